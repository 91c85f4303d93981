"""JSON configuration: parsing, defaults and validation.

Complex numbers are written as ``[re, im]`` (a bare number or a string such
as ``"0.3+1.7j"`` is also accepted); rationals as ``"num/den"`` strings.
Every section is optional.  Validation collects all violations before
raising, so a bad file is reported in one go.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from .ampleness import WeightParams
from .chern import GeometryParams
from .diophantine import DiophantinePair, parse_rational
from .errors import ConfigParseError, ConfigValidationError
from .gluing import GluingConfig
from .theta import HermitianData

SECTIONS = {"seed", "geometry", "gluing", "weights", "theta", "tolerances"}
GEOMETRY_KEYS = {"tau", "p", "q", "exact", "precision", "p0_plus", "p0_minus", "p_plus", "p_minus",
                 "x", "y", "s", "xi"}
GLUING_KEYS = {"R", "s", "xi"}
WEIGHT_KEYS = {f.name for f in fields(WeightParams)}
THETA_KEYS = {"a", "b", "c"}

DEFAULT_TOLERANCES = {
    "torrelation": 1e-12,
    "cocycle": 1e-9,
    "intersection": 1e-6,
    "integrality": 1e-9,
    "solve_residual": 1e-12,
    "two_form": 1e-12,
    "sigma_numeric": 1e-9,
    "xi_sensitivity": 1e-4,
    "psi_gluing": 1e-12,
    "psi_hessian": 1e-5,
}

REFERENCE = {
    "seed": 0,
    "geometry": {
        "tau": [0, 1], "p": "sqrt(2)-1", "q": "sqrt(3)-1",
        "p0_plus": [0, 0], "p0_minus": [0, 0],
        "p_plus": [[j / 10, j / 7] for j in range(1, 9)],
        "p_minus": [[j / 9, -j / 11] for j in range(1, 9)],
        "x": [0.25, 0.5], "y": [-0.5, 0.125], "s": [1e-6, 0],
    },
}


def parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex numbers are [re, im] pairs, got {value!r}")
        return complex(float(_num(value[0])), float(_num(value[1])))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    return complex(value)


def _num(v):
    if isinstance(v, str):
        return parse_rational(v) if "/" in v else float(v)
    return v


def _gaussian(value) -> tuple[Fraction, Fraction]:
    """Exact (re, im) for exact-mode configs."""
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return parse_rational(value[0]), parse_rational(value[1])
    return parse_rational(value), Fraction(0)


def parse_pair(p, q, exact: bool = False, precision: int | None = None) -> DiophantinePair:
    return DiophantinePair.parse(str(p), str(q), exact=exact, precision=precision)


@dataclass
class ToolConfig:
    seed: int
    tau: complex
    pair: DiophantinePair
    geometry: GeometryParams
    gluing: GluingConfig
    weights: WeightParams
    theta: HermitianData
    tolerances: dict
    warnings: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES.get(name, 1e-9))


def _unknown(where: str, got: dict, allowed: set, out: list) -> None:
    for k in sorted(set(got) - allowed):
        out.append((f"{where}.{k}" if where else k, "unknown key"))


def _section(doc: dict, name: str, out: list) -> dict:
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        out.append((name, "must be an object"))
        return {}
    return sec


def _exact_torrelation(g: dict, side: str) -> Fraction | tuple:
    # 9 p0 - sum pj -/+ (q - p tau), all Gaussian rationals
    sg = 1 if side == "plus" else -1
    p0 = _gaussian(g[f"p0_{side}"])
    pts = [_gaussian(v) for v in g[f"p_{side}"]]
    tr, ti = _gaussian(g.get("tau", [0, 1]))
    p, q = parse_rational(g["p"]), parse_rational(g["q"])
    mu = (q - p * tr, -p * ti)
    re = 9 * p0[0] - sum(v[0] for v in pts) - sg * mu[0]
    im = 9 * p0[1] - sum(v[1] for v in pts) - sg * mu[1]
    return re, im


def build_config(doc: dict) -> ToolConfig:
    """Validate a decoded JSON document and build the typed configuration."""
    if not isinstance(doc, dict):
        raise ConfigValidationError([("", "top level must be an object")])
    bad: list[tuple[str, str]] = []
    warnings: list[str] = []
    _unknown("", doc, SECTIONS, bad)
    g = {**REFERENCE["geometry"], **_section(doc, "geometry", bad)}
    gl = _section(doc, "gluing", bad)
    wt = _section(doc, "weights", bad)
    th = _section(doc, "theta", bad)
    tols = _section(doc, "tolerances", bad)
    _unknown("geometry", g, GEOMETRY_KEYS, bad)
    _unknown("gluing", gl, GLUING_KEYS, bad)
    _unknown("weights", wt, WEIGHT_KEYS, bad)
    _unknown("theta", th, THETA_KEYS, bad)
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        bad.append(("seed", "must be an integer"))
        seed = 0
    for k, v in tols.items():
        if not isinstance(v, (int, float)) or v <= 0:
            bad.append((f"tolerances.{k}", "must be a positive number"))
    tolerances = {**DEFAULT_TOLERANCES, **{k: float(v) for k, v in tols.items()
                                           if isinstance(v, (int, float))}}

    def cplx(sec, key, where, default=None):
        try:
            return parse_complex(sec[key]) if key in sec else default
        except (TypeError, ValueError) as e:
            bad.append((f"{where}.{key}", str(e)))
            return default

    tau = cplx(g, "tau", "geometry", 1j)
    if tau.imag <= 0:
        bad.append(("tau", "Im tau must be positive"))
        tau = 1j
    exact = bool(g.get("exact", False))
    try:
        pair = parse_pair(g["p"], g["q"], exact, g.get("precision"))
    except (ValueError, TypeError, SyntaxError) as e:
        bad.append(("geometry.p/q", str(e)))
        pair = parse_pair(REFERENCE["geometry"]["p"], REFERENCE["geometry"]["q"])
    s = cplx(g, "s", "geometry", 1e-6 + 0j)
    if not 0 < abs(s) < 1:
        bad.append(("s", "need 0 < |s| < 1"))
        s = 1e-6 + 0j

    geometry = None
    pts = {}
    for side in ("plus", "minus"):
        raw = g.get(f"p_{side}", [])
        if not isinstance(raw, list) or len(raw) not in (8, 9):
            bad.append((f"geometry.p_{side}", "need 8 points (p9 completed) or 9 points"))
            raw = REFERENCE["geometry"][f"p_{side}"]
        try:
            pts[side] = [parse_complex(v) for v in raw]
        except (TypeError, ValueError) as e:
            bad.append((f"geometry.p_{side}", str(e)))
            pts[side] = [parse_complex(v) for v in REFERENCE["geometry"][f"p_{side}"]]
        if len(raw) == 9:
            if exact:
                try:
                    res = _exact_torrelation(g, side)
                except (TypeError, ValueError) as e:
                    bad.append(("torrelation", f"{side}: {e}"))
                else:
                    if res != (0, 0):
                        bad.append(("torrelation", f"{side}: residual {float(res[0])}+{float(res[1])}i"))
            else:
                sg = 1 if side == "plus" else -1
                p, q = pair.as_float()
                r = 9 * cplx(g, f"p0_{side}", "geometry", 0j) - sum(pts[side]) - sg * (q - p * tau)
                if abs(r) > tolerances["torrelation"]:
                    warnings.append(f"torrelation ({side}) off by {abs(r):.3g}; p9 recomputed")
                    pts[side] = pts[side][:8]
    try:
        xi = cplx(g, "xi", "geometry")
        geometry = GeometryParams.numeric(tau, pair, cplx(g, "p0_plus", "geometry", 0j),
                                          cplx(g, "p0_minus", "geometry", 0j), pts["plus"], pts["minus"],
                                          cplx(g, "x", "geometry", 0j), cplx(g, "y", "geometry", 0j), s, xi)
    except (TypeError, ValueError) as e:
        bad.append(("geometry", str(e)))

    gluing = None
    try:
        R = parse_rational(gl["R"]) if isinstance(gl.get("R"), str) else Fraction(gl.get("R", 2))
        if R <= 1:
            bad.append(("gluing.R", "R must exceed 1"))
        gs = cplx(gl, "s", "gluing", s)
        if not 0 < abs(gs) < 1:
            bad.append(("gluing.s", "need 0 < |s| < 1"))
        if R > 1 and 0 < abs(gs) < 1:
            gluing = GluingConfig.build(tau, pair, R, gs, cplx(gl, "xi", "gluing", 0j))
    except (TypeError, ValueError) as e:
        bad.append(("gluing", str(e)))

    weights = None
    try:
        wkw = {k: v for k, v in wt.items() if k in WEIGHT_KEYS}
        wkw["s"] = cplx(wt, "s", "weights", s)
        for k in list(wkw):
            if k != "s":
                wkw[k] = float(_num(wkw[k]))
        wkw.setdefault("b_over", math.pi / tau.imag)
        weights = WeightParams(**wkw)
        bad.extend((f"weights.{k}", m) for k, m in weights.violations())
    except (TypeError, ValueError) as e:
        bad.append(("weights", str(e)))

    hd = None
    try:
        a = float(_num(th.get("a", 1.0)))
        b = cplx(th, "b", "theta", 0j)
        c = float(_num(th.get("c", 0.0)))
        hd = HermitianData(a, b, c)
    except (TypeError, ValueError) as e:
        bad.append(("theta", str(e)))

    if bad:
        raise ConfigValidationError(bad)
    return ToolConfig(seed, tau, pair, geometry, gluing, weights, hd, tolerances, warnings, doc)


def load_config(path: str | Path | None) -> ToolConfig:
    """Read and validate a JSON config; ``None`` gives the reference fixture."""
    if path is None:
        return build_config({})
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigParseError(f"cannot read {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"{path}: {e}") from e
    return build_config(doc)


def to_jsonable(obj):
    """Complex -> [re, im], Fraction -> "num/den", recursively; numpy scalars unwrapped."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    return obj
