import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from k3kit.cli import main
from k3kit.config import DEFAULT_TOLERANCES, build_config, load_config, to_jsonable
from k3kit.errors import ConfigParseError, ConfigValidationError

def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_minimal_config():
    cfg = build_config({})
    assert cfg.seed == 0 and cfg.tau == 1j
    assert cfg.tol("cocycle") == DEFAULT_TOLERANCES["cocycle"]
    assert load_config(None).tau == 1j


def test_validation_collects_all():
    with pytest.raises(ConfigValidationError) as e:
        build_config({"geometry": {"s": [1.5, 0], "tau": [0, -1]}, "bogus": 1, "gluing": {"R": 0.5}})
    fields = {k for k, _ in e.value.violations}
    assert {"s", "tau", "bogus", "gluing.R"} <= fields


def test_s_at_least_one_rejected():
    with pytest.raises(ConfigValidationError) as e:
        build_config({"geometry": {"s": [1, 0]}})
    assert [k for k, _ in e.value.violations] == ["s"]


def test_weights_validation():
    with pytest.raises(ConfigValidationError) as e:
        build_config({"weights": {"R1": 1.9, "R2": 1.7}})
    assert any(k.startswith("weights.") for k, _ in e.value.violations)


def _nine(side_sign, mu_shift=0.0):
    # exact Gaussian rationals with 9 p0 - sum pj = +-mu for p = 1/5, q = 2/7, tau = i: mu = 2/7 - i/5
    pts = [[f"{j}/10", f"{j}/7"] for j in range(1, 9)]
    s_re = sum(Fraction(j, 10) for j in range(1, 9))
    s_im = sum(Fraction(j, 7) for j in range(1, 9))
    mu = (Fraction(2, 7), Fraction(-1, 5))
    p9 = (-s_re - side_sign * mu[0] + Fraction(mu_shift), -s_im - side_sign * mu[1])
    return pts + [[f"{p9[0].numerator}/{p9[0].denominator}", f"{p9[1].numerator}/{p9[1].denominator}"]]


def test_torrelation_exact_and_float():
    geo = {"p": "1/5", "q": "2/7", "exact": True, "p0_plus": [0, 0], "p0_minus": [0, 0],
           "p_plus": _nine(1), "p_minus": _nine(-1)}
    build_config({"geometry": geo})
    off = {**geo, "p_plus": _nine(1, "1/1000000")}
    with pytest.raises(ConfigValidationError) as e:
        build_config({"geometry": off})
    assert [k for k, _ in e.value.violations] == ["torrelation"]
    cfg = build_config({"geometry": {**off, "exact": False}})
    assert cfg.warnings and "torrelation" in cfg.warnings[0]
    cfg.geometry.check_torrelation()


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigParseError):
        load_config(bad)
    with pytest.raises(ConfigParseError):
        load_config(tmp_path / "missing.json")


def test_to_jsonable():
    import numpy as np

    assert to_jsonable({"a": 1 + 2j, "b": Fraction(1, 3), "c": np.float64(0.5), "d": (np.int64(2),),
                        "e": np.bool_(True)}) == {"a": [1.0, 2.0], "b": "1/3", "c": 0.5, "d": [2], "e": True}


def test_cli_check_diophantine(capsys):
    code, out, _ = run(["check-diophantine", "--p", "sqrt(2)-1", "--q", "sqrt(3)-1", "--n-max", "1000"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["alpha_hat"] > 1
    code, out, _ = run(["check-diophantine", "--p", "1/2", "--q", "1/3", "--exact", "--n-max", "100"], capsys)
    # a torsion hit is a result, not a failed invariant
    assert code == 0 and json.loads(out)["torsion_hit"] == 6


def test_cli_lattice_theta_chern_picard(capsys):
    code, out, _ = run(["lattice", "verify"], capsys)
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(["theta", "intersections", "--a", "1", "--p", "sqrt(2)-1", "--q", "sqrt(3)-1"], capsys)
    assert code == 0
    code, out, _ = run(["chern"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["c1_vector"][:2] == [6, 3] and doc["b"] == 3
    code, out, _ = run(["picard"], capsys)
    assert code == 0 and json.loads(out)["rank"] == 1 and json.loads(out)["contains_c1"]
    code, _, err = run(["chern", "--lplus", "1,2,3"], capsys)
    assert code == 2 and "10" in err


def test_cli_cohomology(tmp_path, capsys):
    doc = {"tau": [0, 1], "p": "sqrt(2)-1", "q": "sqrt(3)-1",
           "modes": [{"n": n, "coeffs": [[0, 0, 1, 0]]} for n in range(1, 30)]}
    code, out, _ = run(["cohomology", "solve", "--input", write(tmp_path, doc), "--ell", "1"], capsys)
    assert code == 0 and json.loads(out)["bound_holds"]


def test_cli_leaf_csv(capsys):
    code, out, _ = run(["leaf", "--w0-re", "0.5", "--samples", "100"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["x1", "x2", "x3"] and len(rows) == 101


def test_cli_config_errors(tmp_path, capsys):
    code, _, err = run(["suite", "lattice", "--config", write(tmp_path, {"geometry": {"s": [2, 0]}})], capsys)
    assert code == 2 and json.loads(err)["violations"][0]["field"] == "s"
    code, _, err = run(["suite", "", "--config", write(tmp_path, {})], capsys)
    assert code == 2
    code, _, _ = run(["suite", "nonsense"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == 2


def test_cli_theta_suite_negative(tmp_path, capsys):
    code, out, _ = run(["suite", "theta", "--config", write(tmp_path, {"theta": {"a": 0, "b": [2, 3]}})], capsys)
    doc = json.loads(out)
    assert code == 1 and not doc["pass"]
    failed = [c["name"] for c in doc["results"]["theta"]["checks"] if not c["pass"]]
    assert "configured_H_cocycle" in failed


def test_suite_determinism(tmp_path, capsys):
    cfg = write(tmp_path, {"seed": 7})
    outs = []
    for _ in range(2):
        code, out, _ = run(["suite", "cohomology", "--config", cfg], capsys)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    code, out, _ = run(["suite", "lattice", "--timings"], capsys)
    assert "timings" in json.loads(out)


def test_console_script_runs():
    r = subprocess.run([sys.executable, "-m", "k3kit.cli", "lattice", "verify"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["pass"]
