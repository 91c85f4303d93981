"""Weights for the ampleness argument: regularized max, lambda/psi, glued weight.

Weights are plurisubharmonic functions phi with metric h = exp(-phi).  All
functions here accept numpy arrays so that audits over 10**4 points are
vectorised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import OnZeroSection
from .numerics import complex_hessian_batch, min_eigenvalues

_KERNEL_C = 35.0 / 32.0


# ---------------------------------------------------------------------------
# regularized maximum


def _g(u, a):
    """int |u - t| rho_a(t) dt for rho_a(t) = (35/32a)(1 - (t/a)^2)^3 on [-a, a]."""
    u = np.abs(np.asarray(u, dtype=np.float64))  # g is even; this makes symmetry exact
    s = np.minimum(u / a, 1.0)
    P = s - s ** 3 + 0.6 * s ** 5 - s ** 7 / 7.0
    inner = u * (35.0 / 16.0) * P + a * (35.0 / 128.0) * (1 - s * s) ** 4
    return np.where(u >= a, u, inner)


def regularized_max(x, y, eta: float):
    """M_eta(x, y) = (x + y)/2 + g(x - y)/2 with g a mollified |.| of width 2 eta.

    Equals max(x, y) when |x - y| >= 2 eta, and
    max <= M_eta <= max + (35/128) eta.  Smooth, symmetric, convex and
    nondecreasing in each argument.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    out = 0.5 * (x + y) + 0.5 * _g(x - y, 2 * eta)
    far = np.abs(x - y) >= 2 * eta
    out = np.where(far, np.maximum(x, y), out)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class WeightParams:
    """Parameters of the weight construction.

    ``b_over`` is the coefficient of the base Kahler form, pi (L.C) / Im tau.
    ``eta`` is the width of the regularized max and ``kappa`` the size of
    the perturbation in the default line-bundle weight.
    """

    s: complex = 1e-5
    R1: float = 1.2
    R2: float = 1.6
    R: float = 2.0
    eps: float = 1e-3
    c: float = 2.0 ** -10
    b_over: float = math.pi
    eta: float = 0.1
    kappa: float = 0.05

    @property
    def abs_s(self) -> float:
        return abs(complex(self.s))

    @property
    def eps0(self) -> float:
        """Largest eps0 for which the default model is on its C branch for |w| < sqrt(eps0) R."""
        return self.eps * math.exp(-2 * self.eta - self.kappa * (self.R ** 2 + E_MAX)) / self.R ** 2

    def violations(self) -> list[tuple[str, str]]:
        out = []
        if not 0 < self.abs_s < 1:
            out.append(("s", "need 0 < |s| < 1"))
        for name in ("R1", "R2", "R", "eps", "c", "b_over", "eta", "kappa"):
            if not getattr(self, name) > 0:
                out.append((name, "must be positive"))
        if out:
            return out
        if not self.abs_s < self.eps0:
            out.append(("s", f"need |s| < eps0 = {self.eps0:.6g}"))
        if not math.sqrt(self.eps0) * self.R < self.R1 < self.R2 < self.R:
            out.append(("R1,R2,R", "need sqrt(eps0) R < R1 < R2 < R"))
        if self.R1 ** 2 < self.eps * math.exp(2 * self.eta + self.kappa * E_MAX):
            out.append(("eps", "too large for the L branch on |w| > R1"))
        if not out and not blend_is_monotone(self):
            out.append(("R2", "the lambda blend on [R2, R] is not monotone"))
        return out

    def validate(self) -> "WeightParams":
        v = self.violations()
        if v:
            from .errors import ConfigValidationError

            raise ConfigValidationError(v)
        return self


# ---------------------------------------------------------------------------
# lambda and psi


def _log_part(t, abs_s):
    return np.log(t * t / abs_s) ** 2


def _blend_coeffs(params: WeightParams):
    R2, R, s = params.R2, params.R, params.abs_s
    ell = math.log(R2 * R2 / s)
    D0 = 4 * ell / R2
    D1 = (8 - 4 * ell) / R2 ** 2
    L = R - R2
    alpha = D0 / L ** 3
    beta = (D1 + 3 * D0 / L) / L ** 3
    return ell ** 2, alpha, beta, L


def blend_is_monotone(params: WeightParams) -> bool:
    """lambda' = (R - t)^3 (alpha + beta (t - R2)) >= 0 on [R2, R]."""
    _, alpha, beta, L = _blend_coeffs(params)
    return alpha >= 0 and alpha + beta * L >= 0


def _blend_integral(u, alpha, beta, L):
    # int_0^u (L - v)^3 (alpha + beta v) dv, v = t - R2
    # expand (L - v)^3 = L^3 - 3L^2 v + 3L v^2 - v^3
    c0 = alpha * L ** 3
    c1 = beta * L ** 3 - 3 * alpha * L ** 2
    c2 = 3 * alpha * L - 3 * beta * L ** 2
    c3 = 3 * beta * L - alpha
    c4 = -beta
    return c0 * u + c1 * u ** 2 / 2 + c2 * u ** 3 / 3 + c3 * u ** 4 / 4 + c4 * u ** 5 / 5


def lambda_weight(t, params: WeightParams):
    """(log(t^2/|s|))^2 for t < R2, constant for t >= R, C^2 quintic blend between."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    base, alpha, beta, L = _blend_coeffs(params)
    inner = _log_part(np.minimum(t, params.R2), params.abs_s)
    u = np.clip(t - params.R2, 0.0, L)
    out = np.where(t < params.R2, inner, base + _blend_integral(u, alpha, beta, L))
    return out if out.ndim else float(out)


def psi(w, params: WeightParams):
    """psi = lambda(|w|); the same formula on both sides."""
    w = np.asarray(w, dtype=np.complex128)
    if np.any(w == 0):
        raise OnZeroSection("psi is singular on the zero section")
    return lambda_weight(np.abs(w), params)


def psi_at(pt, params: WeightParams, side: str = "+") -> float:
    """psi at a chart point (z, w^+) or (z, w^+, w^-); ``side`` picks the fibre coordinate.

    Points outside W (|w| >= R) get the constant lambda(R).
    """
    from .gluing import ChartPoint

    if not isinstance(pt, ChartPoint):
        return float(psi(complex(pt), params))
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    polar = pt.w_minus if (side == "-" and pt.w_minus is not None) else pt.w
    if polar.modulus == 0:
        raise OnZeroSection("psi is singular on the zero section")
    return float(lambda_weight(float(polar.modulus), params))


def psi_gluing_defect(w_plus, params: WeightParams):
    """|psi-(s / w+) - psi+(w+)| (zero in exact arithmetic)."""
    w_plus = np.asarray(w_plus, dtype=np.complex128)
    return np.abs(psi(complex(params.s) / w_plus, params) - psi(w_plus, params))


def psi_hessian_check(z, w, params: WeightParams) -> np.ndarray:
    """Finite-difference complex Hessian of psi in (z, w), steps 1e-4 and 1e-4 |w|.

    Expected [[0, 0], [0, 2/|w|^2]] for 0 < |w| < R2.
    """
    Z = np.column_stack([np.atleast_1d(z), np.atleast_1d(w)]).astype(np.complex128)
    h = np.column_stack([np.full(len(Z), 1e-4), 1e-4 * np.abs(Z[:, 1])])
    return complex_hessian_batch(lambda V: psi(V[:, 1], params), Z, h)


def model_kahler_form(w, params: WeightParams) -> np.ndarray:
    """diag(b_over, 2c/|w|^2) in the (dz, dw) frame, shape (..., 2, 2)."""
    w = np.asarray(w, dtype=np.complex128)
    if np.any(w == 0):
        raise OnZeroSection("the model form is singular on the zero section")
    out = np.zeros(w.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = params.b_over
    out[..., 1, 1] = 2 * params.c / np.abs(w) ** 2
    return out


# ---------------------------------------------------------------------------
# weights on the neighbourhood


E_MAX = 2.0 / (8 * math.pi ** 2)


def e_periodic(z, tau: complex = 1j):
    """A fixed smooth periodic function with small C^2 norm: (cos 2pi x1 + cos 2pi x2)/(8 pi^2)."""
    z = np.asarray(z, dtype=np.complex128)
    x2 = z.imag / tau.imag
    x1 = z.real - x2 * tau.real
    return (np.cos(2 * np.pi * x1) + np.cos(2 * np.pi * x2)) / (8 * np.pi ** 2)


def phi_C(z, params: WeightParams):
    """Weight on C with i ddbar phi_C = b_over i dz ^ dzbar: 2 b_over (Im z)^2."""
    z = np.asarray(z, dtype=np.complex128)
    return 2 * params.b_over * z.imag ** 2


def phi_L_default(z, w, params: WeightParams, tau: complex = 1j):
    """phi_C(z) + log|w|^2 + kappa (|w|^2 + e(z))."""
    w = np.asarray(w, dtype=np.complex128)
    return phi_C(z, params) + np.log(np.abs(w) ** 2) + params.kappa * (np.abs(w) ** 2 + e_periodic(z, tau))


def glued_weight(z, w, params: WeightParams,
                 phiL_model: Callable | None = None, tau: complex = 1j):
    """phi = M_eta(phi_L, phi_C + log eps) and the branch tag per point.

    Branch 'L' where phi_L exceeds phi_C + log eps by at least 2 eta (so
    h = h_L there), 'C' in the opposite case (h = eps^-1 h_C), else 'blend'.
    """
    if phiL_model is None:
        def phiL_model(zz, ww):
            return phi_L_default(zz, ww, params, tau)
    x = np.asarray(phiL_model(z, w), dtype=np.float64)
    y = np.asarray(phi_C(z, params) + math.log(params.eps), dtype=np.float64)
    val = regularized_max(x, y, params.eta)
    d = x - y
    branch = np.where(d >= 2 * params.eta, "L", np.where(d <= -2 * params.eta, "C", "blend"))
    if np.ndim(val) == 0:
        return float(val), str(branch)
    return val, branch


def total_weight(z, w, params: WeightParams, phiL_model=None, tau: complex = 1j):
    """phi + c psi."""
    val, _ = glued_weight(z, w, params, phiL_model, tau)
    return val + params.c * psi(w, params)


def sample_annulus(params: WeightParams, n: int, rng: np.random.Generator,
                   tau: complex = 1j, lo: float | None = None, hi: float | None = None):
    """n points with z in the fundamental domain and log|w| uniform on (lo, hi)."""
    lo = math.sqrt(params.abs_s) / params.R if lo is None else lo
    hi = params.R if hi is None else hi
    x = rng.uniform(0, 1, size=(n, 2))
    z = x[:, 0] + x[:, 1] * tau
    r = np.exp(rng.uniform(math.log(lo), math.log(hi), size=n))
    w = r * np.exp(2j * np.pi * rng.uniform(0, 1, size=n))
    return z, w


def weight_hessians(z, w, params: WeightParams, phiL_model=None, tau: complex = 1j,
                    with_psi: bool = True, scale: float = 1.0) -> np.ndarray:
    Z = np.column_stack([z, w]).astype(np.complex128)
    h = scale * np.column_stack([np.full(len(Z), 1e-4), 1e-4 * np.abs(Z[:, 1])])
    if with_psi:
        f = lambda V: total_weight(V[:, 0], V[:, 1], params, phiL_model, tau)  # noqa: E731
    else:
        f = lambda V: glued_weight(V[:, 0], V[:, 1], params, phiL_model, tau)[0]  # noqa: E731
    return complex_hessian_batch(f, Z, h)


@dataclass
class AuditReport:
    n_samples: int
    c: float
    min_eigenvalue: float
    min_scaled_eigenvalue: float
    by_branch: dict = field(default_factory=dict)
    by_region: dict = field(default_factory=dict)
    branch_counts: dict = field(default_factory=dict)
    richardson_gap: float = 0.0

    @property
    def positive(self) -> bool:
        return self.min_eigenvalue > 0

    def to_json(self) -> dict:
        return {"n_samples": self.n_samples, "c": self.c, "min_eigenvalue": self.min_eigenvalue,
                "min_scaled_eigenvalue": self.min_scaled_eigenvalue, "positive": self.positive,
                "min_eigenvalue_by_branch": self.by_branch, "min_eigenvalue_by_region": self.by_region,
                "branch_counts": self.branch_counts, "richardson_gap": self.richardson_gap}


def _scaled(H: np.ndarray, w: np.ndarray) -> np.ndarray:
    # rescale the w-direction by |w| so the two directions are comparable
    D = np.ones(H.shape[:-1], dtype=np.float64)
    D[:, 1] = np.abs(w)
    return H * D[:, :, None] * D[:, None, :]


def audit(params: WeightParams, n: int, seed: int = 0, phiL_model=None, tau: complex = 1j,
          c: float | None = None) -> AuditReport:
    """Min complex-Hessian eigenvalue of phi + c psi on {sqrt|s|/R < |w| < R}."""
    if c is not None:
        params = _with_c(params, c)
    rng = np.random.default_rng(seed)
    z, w = sample_annulus(params, n, rng, tau)
    H = weight_hessians(z, w, params, phiL_model, tau)
    eig = min_eigenvalues(H)
    seig = min_eigenvalues(_scaled(H, w))
    _, branch = glued_weight(z, w, params, phiL_model, tau)
    r = np.abs(w)
    regions = {
        "inner_annulus": r < math.sqrt(params.abs_s) * params.R,
        "C_zone": r < math.sqrt(params.eps0) * params.R,
        "transition": (r >= math.sqrt(params.eps0) * params.R) & (r <= params.R1),
        "L_zone": r > params.R1,
        "blend_zone": (r >= params.R2) & (r < params.R),
    }
    by_region = {k: float(eig[m].min()) for k, m in regions.items() if m.any()}
    by_branch = {b: float(eig[branch == b].min()) for b in ("L", "C", "blend") if np.any(branch == b)}
    counts = {b: int(np.sum(branch == b)) for b in ("L", "C", "blend")}
    k = min(n, 64)
    H2 = weight_hessians(z[:k], w[:k], params, phiL_model, tau, scale=0.5)
    gap = float(np.max(np.abs(_scaled(H[:k], w[:k]) - _scaled(H2, w[:k]))))
    return AuditReport(n, params.c, float(eig.min()), float(seig.min()), by_branch, by_region, counts, gap)


def _with_c(params: WeightParams, c: float) -> WeightParams:
    from dataclasses import replace

    return replace(params, c=c)


def line_search_c(params: WeightParams, n: int = 2000, seed: int = 0, phiL_model=None,
                  tau: complex = 1j, c_start: float = 1.0, steps: int = 30) -> float:
    """Largest c = c_start / 2**k (k <= steps) whose sampled audit is positive.

    Large c lets the concave part of lambda on [R2, R] win over the L-branch
    curvature; small c starves the C branch of w-curvature.  Raises if no
    tried value passes.
    """
    c = c_start
    for _ in range(steps + 1):
        if audit(params, n, seed, phiL_model, tau, c=c).positive:
            return c
        c /= 2
    raise ArithmeticError(f"no c in [{c}, {c_start}] passes the audit")
