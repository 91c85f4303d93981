"""Invariant suites run by ``k3kit suite``.

Each suite returns a list of checks {name, pass, value, tolerance}.  Reports
are deterministic for a fixed config and seed; wall-clock timings are kept
in a separate mapping so they can be dropped before comparing reports.
"""
from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from . import ampleness, chern, cohomology, gluing, lattice, theta
from .config import ToolConfig, to_jsonable
from .errors import K3KitError
from .lattice import SurfaceClass

SUITES = ("lattice", "theta", "cohomology", "gluing", "ampleness", "chern")


def _check(name, ok, value=None, tolerance=None) -> dict:
    return {"name": name, "pass": bool(ok), "value": value, "tolerance": tolerance}


def _rng(cfg: ToolConfig, salt: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, salt])


def lattice_suite(cfg: ToolConfig) -> list[dict]:
    K = lattice.gram_matrix_k3()
    out = [
        _check("even", K.even),
        _check("signature", K.signature == (3, 19), list(K.signature)),
        _check("unimodular", abs(K.det) == 1, K.det),
    ]
    for side in lattice.SIDES:
        G = lattice.c_basis_gram(side)
        out.append(_check(f"C_{side}_det", lattice.det_bareiss(G) == 1, lattice.det_bareiss(G)))
        out.append(_check(f"C_{side}_negative_definite", lattice.is_negative_definite(G)))
        out.append(_check(f"C_{side}_negated_E8", lattice.matches_negated_e8(G)))
    return out


def theta_suite(cfg: ToolConfig, n_triples: int = 500, n_forms: int = 50) -> list[dict]:
    rng = _rng(cfg, 2)
    lat = theta.ToroidalLattice(cfg.tau, cfg.pair)
    worst_cocycle = worst_metric = 0.0
    for _ in range(n_triples):
        Hd = theta.random_admissible(lat, rng, 3)
        rho = theta.SemiCharacter.from_phases(*rng.uniform(0, 1, 3))
        lam = [int(v) for v in rng.integers(-3, 4, 3)]
        mu = [int(v) for v in rng.integers(-3, 4, 3)]
        x = rng.normal(size=2) + 1j * rng.normal(size=2)
        worst_cocycle = max(worst_cocycle, theta.cocycle_defect(Hd, rho, lat, lam, mu, x))
        worst_metric = max(worst_metric, theta.metric_defect(Hd, rho, lat, lam, x, 1.0))
    tol = cfg.tol("cocycle")
    out = [_check("cocycle_identity", worst_cocycle < tol, worst_cocycle, tol),
           _check("metric_invariance", worst_metric < tol, worst_metric, tol)]

    H0 = cfg.theta
    rho = theta.SemiCharacter()
    integral = theta.integrality_check(H0, lat).ok
    d = 0.0
    for _ in range(50):
        lam = [int(v) for v in rng.integers(-3, 4, 3)]
        mu = [int(v) for v in rng.integers(-3, 4, 3)]
        x = rng.normal(size=2) + 1j * rng.normal(size=2)
        d = max(d, theta.cocycle_defect(H0, rho, lat, lam, mu, x, strict=False))
    out.append(_check("configured_H_integral", integral, list(theta.integrality_check(H0, lat).values)))
    out.append(_check("configured_H_cocycle", d < tol, d, tol))

    itol = cfg.tol("intersection")
    worst = 0.0
    agree = True
    for _ in range(n_forms):
        Hd = theta.random_admissible(lat, rng, 3)
        closed = theta.intersection_numbers(Hd, lat)
        num = [theta.integrate_chern_cycle(Hd, lat, c) for c in theta.CYCLES]
        worst = max(worst, max(abs(a - b) for a, b in zip(closed, num)))
        integers = all(abs(v - round(v)) < cfg.tol("integrality") for v in closed)
        agree &= integers == theta.integrality_check(Hd, lat).ok
        ext = theta.is_extendable(Hd)
        agree &= ext == (abs(closed[1]) < 1e-9 and abs(closed[2]) < 1e-9)
    out.append(_check("intersection_closed_vs_integrated", worst < itol, worst, itol))
    out.append(_check("integrality_and_extendability_routes_agree", agree))
    return out


def cohomology_suite(cfg: ToolConfig, n_roundtrip: int = 100, n_modes: int = 200) -> list[dict]:
    rng = _rng(cfg, 3)
    tau, pair = cfg.tau, cfg.pair
    tol = cfg.tol("solve_residual")
    worst = 0.0
    for k in range(n_roundtrip):
        char = cohomology.FlatCharacter(*rng.uniform(-0.5, 0.5, 2))
        f = cohomology.manufactured_section(rng, char)
        g = cohomology.solve_twisted_dbar(tau, f)
        worst = max(worst, cohomology.residual(tau, g, f))
    out = [_check("roundtrip_residual", worst < tol, worst, tol)]
    try:
        rep = cohomology.solve_vertical_series(tau, pair, cohomology.resonant_series(tau, pair, n_modes, ell=0.5),
                                               ell=0.5)
        out.append(_check("growth_bound_holds", rep.holds(),
                          {"alpha_hat": rep.alpha_hat, "K_hat": rep.K_hat}))
    except K3KitError as e:
        out.append(_check("growth_bound_holds", False, f"{type(e).__name__}: {e}"))
    return out


def gluing_suite(cfg: ToolConfig, n_points: int = 10_000, n_jacobian: int = 1000) -> list[dict]:
    gc = cfg.gluing
    rng = _rng(cfg, 4)
    inner, outer = math.sqrt(float(gc.inner_sq)), math.sqrt(float(gc.outer_sq))
    fiber = roundtrip = True
    jac = 0.0
    family = True
    for k in range(n_points):
        r = math.exp(rng.uniform(math.log(inner), math.log(outer)))
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        w = r * complex(math.cos(2 * math.pi * rng.uniform()), math.sin(2 * math.pi * rng.uniform()))
        pt = gluing.ChartPoint.from_complex(gc, "Wplus", z, w)
        if "in_Vs" not in gluing.region_of(gc, pt):
            continue
        img = gluing.glue_fs(gc, pt)
        fiber &= img.w.modulus * pt.w.modulus == gc.s.modulus
        roundtrip &= gluing.equivalent(gc, gluing.glue_fs_inverse(gc, img), pt)
        if k < n_jacobian:
            jac = max(jac, abs(gluing.two_form_jacobian(gc, pt) + 1))
        fam = gluing.family_chart_map(gc, pt, strict=False)
        family &= gluing.fiber_value(fam).modulus == gc.s.modulus
        family &= gluing.fiber_value(fam).angle.congruent(gc.s.angle, gc.pair)
    tol = cfg.tol("two_form")
    return [_check("modulus_product_exact", fiber), _check("roundtrip_modulo_deck", roundtrip),
            _check("two_form_ratio", jac < tol, jac, tol), _check("family_fiber_exact", family)]


def leaf_suite(cfg: ToolConfig) -> list[dict]:
    gc = cfg.gluing
    w0 = math.sqrt(float(gc.s.modulus))
    out = []
    if gc.pair.is_rational:
        tr = gluing.trace_leaf(gc, w0, 10_000, cfg.seed)
        L = gc.pair.torsion_level()
        nd = gluing.distinct_values(tr.points[:, 2])
        floor = gluing.torsion_floor(gc, w0)
        out.append(_check("torsion_theta_values", nd <= L, nd, L))
        out.append(_check("torsion_discrepancy_floor", gluing.discrepancy(tr.points) >= floor,
                          gluing.discrepancy(tr.points), floor))
    else:
        d3 = gluing.discrepancy(gluing.trace_leaf(gc, w0, 1000, cfg.seed).points)
        d5 = gluing.discrepancy(gluing.trace_leaf(gc, w0, 100_000, cfg.seed).points)
        out.append(_check("discrepancy_decreases", d5 < d3, [d3, d5]))
        tr = gluing.trace_leaf(gc, w0, 1000, cfg.seed)
    out.append(_check("modulus_drift_zero", tr.drift == 0.0, tr.drift))
    return out


def ampleness_suite(cfg: ToolConfig, n: int = 10_000) -> list[dict]:
    P = cfg.weights
    rng = _rng(cfg, 6)
    x, y = rng.normal(size=(2, n)) * 0.3
    eta = P.eta
    M = ampleness.regularized_max(x, y, eta)
    mx = np.maximum(x, y)
    far = np.abs(x - y) >= 2 * eta
    ok_band = bool(np.all(M[far] == mx[far]))
    ok_sand = bool(np.all((mx <= M) & (M <= mx + eta)))
    x2, y2 = rng.normal(size=(2, n)) * 0.3
    mid = ampleness.regularized_max((x + x2) / 2, (y + y2) / 2, eta)
    ok_convex = bool(np.all(mid <= (M + ampleness.regularized_max(x2, y2, eta)) / 2 + 1e-15))
    dx = np.abs(rng.normal(size=n)) * 0.1
    ok_mono = bool(np.all(ampleness.regularized_max(x + dx, y, eta) >= M - 1e-15))
    ok_sym = bool(np.all(ampleness.regularized_max(y, x, eta) == M))
    out = [_check("regmax_equals_max_off_band", ok_band), _check("regmax_sandwich", ok_sand),
           _check("regmax_convex", ok_convex), _check("regmax_monotone", ok_mono),
           _check("regmax_symmetric", ok_sym)]
    s = P.abs_s
    r = np.exp(rng.uniform(math.log(math.sqrt(s) / P.R), math.log(math.sqrt(s) * P.R), n))
    w = r * np.exp(2j * np.pi * rng.uniform(size=n))
    g = float(np.max(ampleness.psi_gluing_defect(w, P)))
    out.append(_check("psi_gluing", g < cfg.tol("psi_gluing"), g, cfg.tol("psi_gluing")))
    m = min(n, 1000)
    r = np.exp(rng.uniform(math.log(math.sqrt(s) / P.R), math.log(P.R2 * 0.999), m))
    wz = r * np.exp(2j * np.pi * rng.uniform(size=m))
    z = rng.uniform(0, 1, m) + 1j * rng.uniform(0, 1, m)
    H = ampleness.psi_hessian_check(z, wz, P)
    ref = 2 / r ** 2
    err = float(np.max(np.abs(H - np.einsum("i,jk->ijk", ref, [[0, 0], [0, 1]])) / ref[:, None, None]))
    out.append(_check("psi_hessian", err < cfg.tol("psi_hessian"), err, cfg.tol("psi_hessian")))
    rep = ampleness.audit(P, n, cfg.seed, tau=cfg.tau)
    out.append(_check("weight_positivity", rep.positive, rep.to_json()))
    return out


def chern_suite(cfg: ToolConfig, n_pairs: int = 1000, n_draws: int = 50) -> list[dict]:
    rng = _rng(cfg, 7)
    vanish = degree = selfint = True
    for _ in range(n_pairs):
        a, b = chern.random_degree_matched_pair(rng)
        c1 = chern.chern_class(a, b)
        vanish &= all(c1[k] == 0 for k in ("A_bg", "B_a", "A_ga", "B_b"))
        deg = gluing.degree_on_C(a)
        degree &= lattice.intersect_marked(c1, lattice.MarkedClass.basis("A_ab")) == deg
        selfint &= (lattice.intersect_marked(c1, c1)
                    == lattice.intersect_surface(a, a) + lattice.intersect_surface(b, b))
    out = [_check("vanishing_coefficients", vanish), _check("pairing_with_A_ab", degree),
           _check("self_intersection", selfint)]
    G = chern.GeometryParams.symbols()
    sym_ok = True
    tries = 0
    while tries < 50:
        a, b = chern.random_degree_matched_pair(rng)
        if gluing.degree_on_C(a) == 0:
            continue
        tries += 1
        sym_ok &= chern.verify_sigma_orthogonality(G, a, b).is_zero()
    out.append(_check("sigma_orthogonal_symbolic", sym_ok))
    worst = 0.0
    sens = math.inf
    H = SurfaceClass.H()
    for _ in range(n_draws):
        P = chern.numeric_draw(rng, cfg.pair, cfg.tau)
        worst = max(worst, chern.verify_sigma_orthogonality(P, H, H))
        sens = min(sens, chern.verify_sigma_orthogonality(P, H, H, 1e-3))
    cg = chern.verify_sigma_orthogonality(cfg.geometry, H, H)
    tol = cfg.tol("sigma_numeric")
    out.append(_check("sigma_orthogonal_numeric", max(worst, cg) < tol, max(worst, cg), tol))
    out.append(_check("xi_sensitivity", sens >= cfg.tol("xi_sensitivity"), sens, cfg.tol("xi_sensitivity")))
    pic = chern.generic_picard_lattice(chern.sigma_vector(G.with_xi(H, H)), chern.DEFAULT_INDEPENDENT)
    out.append(_check("picard_contains_c1", pic.contains(chern.chern_class(H, H))))
    out.append(_check("picard_rank_at_most_2", pic.rank <= 2, pic.rank))
    return out


RUNNERS: dict[str, Callable[[ToolConfig], list[dict]]] = {
    "lattice": lattice_suite,
    "theta": theta_suite,
    "cohomology": cohomology_suite,
    "gluing": lambda cfg: gluing_suite(cfg) + leaf_suite(cfg),
    "ampleness": ampleness_suite,
    "chern": chern_suite,
}


def run_suite(cfg: ToolConfig, suite: str) -> tuple[dict, dict]:
    """Run one suite (or ``all``); returns (report, timings)."""
    if suite == "all":
        names = list(SUITES)
    elif suite in RUNNERS:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    results, timings = {}, {}
    for name in names:
        t = time.perf_counter()
        try:
            checks = RUNNERS[name](cfg)
        except K3KitError as e:
            checks = [_check("suite_error", False, f"{type(e).__name__}: {e}")]
        timings[name] = time.perf_counter() - t
        results[name] = {"pass": all(c["pass"] for c in checks), "checks": checks}
    report = {"suite": suite, "seed": cfg.seed, "pass": all(r["pass"] for r in results.values()),
              "warnings": list(cfg.warnings), "results": results}
    return to_jsonable(report), timings

