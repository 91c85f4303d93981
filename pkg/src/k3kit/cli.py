"""Command line entry point.

Exit codes: 0 success, 1 an invariant failed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .config import load_config, parse_complex, parse_pair, to_jsonable
from .errors import ConfigError, ConfigValidationError, K3KitError, TorsionHit

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers


def _emit_json(doc: dict, out: str | None) -> None:
    text = json.dumps(to_jsonable(doc), indent=2, sort_keys=True) + "\n"
    if out in (None, "-", "json"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_csv(header: list[str], rows, out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if out in (None, "-", "csv"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue())


def _int_list(text: str, n: int) -> tuple:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected {n} comma-separated integers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"expected {n} comma-separated integers, got {len(vals)}")
    return vals


# ---------------------------------------------------------------------------
# commands


def cmd_check_diophantine(args) -> int:
    from .diophantine import approximation_exponent, classify_pair, delta_scan

    pair = parse_pair(args.p, args.q, args.exact, args.precision)
    cls = classify_pair(pair)
    doc = {"pair": pair.to_json(), "classification": cls.value, "n_max": args.n_max}
    try:
        rep = approximation_exponent(pair, args.n_max)
        doc.update(alpha_hat=rep.alpha_hat, A_hat=rep.A_hat, argmax_n=rep.argmax_n,
                   table=[{"n": n, "delta": d, "bound": float(rep.bound(n))} for n, d in rep.table(args.table)])
    except TorsionHit as e:
        delta = delta_scan(pair, min(args.n_max, e.n))
        doc.update(alpha_hat=None, A_hat=None, torsion_hit=e.n,
                   table=[{"n": n + 1, "delta": float(d)} for n, d in enumerate(delta[: args.table])])
    fmt = args.out if args.out in ("json", "csv") else ("csv" if str(args.out).endswith(".csv") else "json")
    if fmt == "csv":
        _emit_csv(["n", "delta"], [(r["n"], repr(r["delta"])) for r in doc["table"]], args.out)
    else:
        _emit_json(doc, args.out)
    return EXIT_OK


def cmd_lattice_verify(args) -> int:
    from .lattice import gram_matrix_k3

    K = gram_matrix_k3()
    ok = K.even and K.signature == (3, 19) and abs(K.det) == 1 and K.e8_check
    _emit_json({"gram": [list(r) for r in K.gram], "det": K.det, "signature": list(K.signature),
                "even": K.even, "e8_check": K.e8_check, "pass": ok}, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_theta_intersections(args) -> int:
    from . import theta

    lat = theta.ToroidalLattice(parse_complex(args.tau), parse_pair(args.p, args.q, args.exact))
    Hd = theta.HermitianData(args.a, complex(args.b_re, args.b_im), 0.0)
    closed = theta.intersection_numbers(Hd, lat)
    num = [theta.integrate_chern_cycle(Hd, lat, c, grid=args.grid) for c in theta.CYCLES]
    integ = theta.integrality_check(Hd, lat)
    err = max(abs(a - b) for a, b in zip(closed, num))
    ok = err < args.tol
    _emit_json({"cycles": list(theta.CYCLES), "closed_form": list(closed), "integrated": num,
                "max_abs_difference": err, "integral": integ.ok, "imH_values": list(integ.values),
                "extendable": theta.is_extendable(Hd, lat), "pass": ok}, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cohomology_solve(args) -> int:
    from .cohomology import parse_modes_json, solve_vertical_series

    try:
        doc = json.loads(Path(args.input).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read {args.input}: {e}") from e
    tau, pair, modes = parse_modes_json(doc)
    rep = solve_vertical_series(tau, pair, modes, args.ell, keep_solutions=True)
    ok = rep.holds()
    sols = [{"n": n + 1, "coeffs": [[m[0], m[1], c.real, c.imag] for m, c in sorted(g.coeffs.items())]}
            for n, g in enumerate(rep.solutions)]
    _emit_json({"ell": rep.ell, "M": rep.M, "K_hat": rep.K_hat, "alpha_hat": rep.alpha_hat,
                "certified_radius": rep.certified_radius,
                "worst_inverse_denominator": rep.worst_inverse_denominator,
                "modes": [{"n": n, "denominator": d, "g_norm": g, "bound": b} for n, d, g, b in rep.modes()],
                "solutions": sols, "bound_holds": ok}, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_glue_check(args) -> int:
    from .suites import gluing_suite

    cfg = load_config(args.config)
    checks = gluing_suite(cfg, n_points=args.points)
    ok = all(c["pass"] for c in checks)
    _emit_json({"checks": checks, "pass": ok, "warnings": cfg.warnings}, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_leaf(args) -> int:
    from .gluing import discrepancy, trace_leaf

    cfg = load_config(args.config)
    tr = trace_leaf(cfg.gluing, complex(args.w0_re, args.w0_im), args.samples, cfg.seed)
    rows = [(repr(float(a)), repr(float(b)), repr(float(c))) for a, b, c in tr.points]
    _emit_csv(["x1", "x2", "x3"], rows, args.out)
    sys.stderr.write(f"discrepancy {discrepancy(tr.points):.6g}, |w| drift {tr.drift}\n")
    return EXIT_OK if tr.drift == 0 else EXIT_FAIL


def cmd_ampleness_audit(args) -> int:
    from .ampleness import audit

    cfg = load_config(args.config)
    rep = audit(cfg.weights, args.samples, cfg.seed, tau=cfg.tau)
    _emit_json({**rep.to_json(), "params": {k: v for k, v in vars(cfg.weights).items()}}, args.out)
    return EXIT_OK if rep.positive else EXIT_FAIL


def cmd_chern(args) -> int:
    from . import chern
    from .lattice import SurfaceClass, intersect_surface

    cfg = load_config(args.config)
    Lp = SurfaceClass(_int_list(args.lplus, 10), "plus")
    Lm = SurfaceClass(_int_list(args.lminus, 10), "minus")
    c1 = chern.chern_class(Lp, Lm)
    b = chern.degree_on_C(Lp)
    doc = {"b": b, "n9_plus": intersect_surface(Lp, SurfaceClass.E(9, "plus")),
           "n9_minus": intersect_surface(Lm, SurfaceClass.E(9, "minus")),
           "c1": c1.as_dict(), "c1_vector": list(c1.coefficients)}
    ok = True
    if b != 0:
        res = chern.verify_sigma_orthogonality(cfg.geometry, Lp, Lm)
        sym = chern.verify_sigma_orthogonality(chern.GeometryParams.symbols(), Lp, Lm)
        tol = cfg.tol("sigma_numeric")
        ok = res < tol and sym.is_zero()
        doc.update(residual=res, residual_tolerance=tol, symbolic_residual=repr(sym),
                   xi=cfg.geometry.with_xi(Lp, Lm).xi)
    else:
        doc.update(residual=None, note="b = 0: xi is not determined by (L+, L-)")
    doc["pass"] = ok
    _emit_json(doc, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_picard(args) -> int:
    from . import chern
    from .lattice import SurfaceClass

    load_config(args.config)  # validated for consistency with the other commands
    Lp = SurfaceClass(_int_list(args.lplus, 10), "plus")
    Lm = SurfaceClass(_int_list(args.lminus, 10), "minus")
    indep = chern.DEFAULT_INDEPENDENT if args.independent is None else tuple(
        s for s in args.independent.split(",") if s)
    G = chern.GeometryParams.symbols()
    sigma = chern.sigma_vector(G.with_xi(Lp, Lm) if not args.free_xi else G)
    if args.free_xi:
        indep = indep + ("xi",)
    pic = chern.generic_picard_lattice(sigma, indep)
    doc = pic.to_json()
    doc["contains_c1"] = pic.contains(chern.chern_class(Lp, Lm))
    _emit_json(doc, args.out)
    return EXIT_OK


def cmd_suite(args) -> int:
    from .suites import run_suite

    if not args.name:
        raise UsageError("suite name must not be empty")
    cfg = load_config(args.config)
    try:
        report, timings = run_suite(cfg, args.name)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.timings:
        report["timings"] = timings
    _emit_json(report, args.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="k3kit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"k3kit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-diophantine", help="small-denominator scan of a pair (p, q)")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--exact", action="store_true", help="parse p and q as exact rationals")
    p.add_argument("--precision", type=int, default=None, help="working precision in bits")
    p.add_argument("--n-max", type=int, default=10_000)
    p.add_argument("--table", type=int, default=50, help="rows of the delta table to emit")
    p.add_argument("--out", default="json", help="json, csv, or an output path")
    p.set_defaults(func=cmd_check_diophantine)

    p = sub.add_parser("lattice", help="marked K3 lattice")
    lsub = p.add_subparsers(dest="action", required=True)
    q = lsub.add_parser("verify")
    q.add_argument("--out", default="json")
    q.set_defaults(func=cmd_lattice_verify)

    p = sub.add_parser("theta", help="theta line bundles")
    tsub = p.add_subparsers(dest="action", required=True)
    q = tsub.add_parser("intersections")
    q.add_argument("--tau", default="1j")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b-re", type=float, default=0.0)
    q.add_argument("--b-im", type=float, default=0.0)
    q.add_argument("--p", required=True)
    q.add_argument("--q", required=True)
    q.add_argument("--exact", action="store_true")
    q.add_argument("--grid", type=int, default=16)
    q.add_argument("--tol", type=float, default=1e-6)
    q.add_argument("--out", default="json")
    q.set_defaults(func=cmd_theta_intersections)

    p = sub.add_parser("cohomology", help="twisted dbar solver")
    csub = p.add_subparsers(dest="action", required=True)
    q = csub.add_parser("solve")
    q.add_argument("--input", required=True)
    q.add_argument("--ell", type=float, required=True)
    q.add_argument("--out", default="json")
    q.set_defaults(func=cmd_cohomology_solve)

    p = sub.add_parser("glue", help="gluing invariants")
    gsub = p.add_subparsers(dest="action", required=True)
    q = gsub.add_parser("check")
    q.add_argument("--config")
    q.add_argument("--points", type=int, default=10_000)
    q.add_argument("--out", default="json")
    q.set_defaults(func=cmd_glue_check)

    p = sub.add_parser("leaf", help="trace a Levi-flat leaf as CSV")
    p.add_argument("--config")
    p.add_argument("--w0-re", type=float, required=True)
    p.add_argument("--w0-im", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--out", default="csv")
    p.set_defaults(func=cmd_leaf)

    p = sub.add_parser("ampleness", help="weight positivity audit")
    asub = p.add_subparsers(dest="action", required=True)
    q = asub.add_parser("audit")
    q.add_argument("--config")
    q.add_argument("--samples", type=int, default=10_000)
    q.add_argument("--out", default="json")
    q.set_defaults(func=cmd_ampleness_audit)

    hh = ",".join(["1"] + ["0"] * 9)
    p = sub.add_parser("chern", help="Chern class of L+ v L-")
    p.add_argument("--config")
    p.add_argument("--lplus", default=hh, help="q0,...,q9 of q0 H - sum qj Ej")
    p.add_argument("--lminus", default=hh)
    p.add_argument("--out", default="json")
    p.set_defaults(func=cmd_chern)

    p = sub.add_parser("picard", help="generic Picard lattice")
    p.add_argument("--config")
    p.add_argument("--lplus", default=hh)
    p.add_argument("--lminus", default=hh)
    p.add_argument("--independent", default=None,
                   help="comma-separated Q-independent symbols (default: all free symbols)")
    p.add_argument("--free-xi", action="store_true", help="keep xi as an independent symbol")
    p.add_argument("--out", default="json")
    p.set_defaults(func=cmd_picard)

    p = sub.add_parser("suite", help="run an invariant suite")
    p.add_argument("name", help="lattice, theta, cohomology, gluing, ampleness, chern or all")
    p.add_argument("--config")
    p.add_argument("--timings", action="store_true", help="add wall-clock timings (non-deterministic)")
    p.add_argument("--out", default="json")
    p.set_defaults(func=cmd_suite)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigValidationError as e:
        json.dump({"error": "validation", "violations": [{"field": k, "message": m} for k, m in e.violations]},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_USAGE
    except (ConfigError, UsageError) as e:
        sys.stderr.write(f"k3kit: {e}\n")
        return EXIT_USAGE
    except (K3KitError, ValueError) as e:
        sys.stderr.write(f"k3kit: {type(e).__name__}: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
