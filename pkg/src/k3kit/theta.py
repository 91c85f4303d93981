"""Theta line bundles L_{H, rho} on the toroidal group C^2 / Lambda.

Lambda is generated by lambda1 = (0, 1), lambda2 = (1, p), lambda3 = (tau, q).
Points are x = (z, eta); H(x, y) = x^T H conj(y) with H = [[a, b], [conj b, c]].
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diophantine import DiophantinePair
from .errors import CNotRemoved, NotIntegral

DEFAULT_TOL = 1e-9
CYCLES = ("ab", "bg", "ga")


@dataclass(frozen=True)
class ToroidalLattice:
    tau: complex
    pair: DiophantinePair

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise ValueError("Im tau must be positive")
        object.__setattr__(self, "tau", complex(self.tau))

    @property
    def p(self) -> float:
        return float(self.pair.p)

    @property
    def q(self) -> float:
        return float(self.pair.q)

    def generators(self) -> list[np.ndarray]:
        return [np.array([0, 1], dtype=complex),
                np.array([1, self.p], dtype=complex),
                np.array([self.tau, self.q], dtype=complex)]

    def vector(self, k: Sequence[int]) -> np.ndarray:
        g = self.generators()
        return k[0] * g[0] + k[1] * g[1] + k[2] * g[2]


@dataclass(frozen=True)
class HermitianData:
    a: float
    b: complex
    c: float = 0.0

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [np.conj(self.b), self.c]], dtype=complex)


@dataclass(frozen=True)
class SemiCharacter:
    rho1: complex = 1
    rho2: complex = 1
    rho3: complex = 1

    @classmethod
    def from_phases(cls, t1: float, t2: float, t3: float) -> "SemiCharacter":
        """rho_i = exp(2 pi i t_i)."""
        return cls(*(cmath.exp(2j * math.pi * t) for t in (t1, t2, t3)))

    def values(self) -> tuple:
        return (complex(self.rho1), complex(self.rho2), complex(self.rho3))


def hermitian_pairing(Hd: HermitianData, x: Sequence[complex], y: Sequence[complex]) -> complex:
    x1, x2 = complex(x[0]), complex(x[1])
    y1, y2 = complex(y[0]).conjugate(), complex(y[1]).conjugate()
    return Hd.a * x1 * y1 + Hd.b * x1 * y2 + complex(Hd.b).conjugate() * x2 * y1 + Hd.c * x2 * y2


def _imH_table(Hd: HermitianData, lat: ToroidalLattice) -> np.ndarray:
    g = lat.generators()
    return np.array([[hermitian_pairing(Hd, u, v).imag for v in g] for u in g])


@dataclass(frozen=True)
class IntegralityReport:
    ok: bool
    values: tuple


def _near_int(v: float, tol: float) -> bool:
    return abs(v - round(v)) <= tol * max(1.0, abs(v))


def integrality_check(Hd: HermitianData, lat: ToroidalLattice, tol: float = DEFAULT_TOL) -> IntegralityReport:
    """Im H(lambda2, lambda1), Im H(lambda3, lambda1), Im H(lambda3, lambda2) and whether all are integers."""
    E = _imH_table(Hd, lat)
    vals = (float(E[1, 0]), float(E[2, 0]), float(E[2, 1]))
    return IntegralityReport(all(_near_int(v, tol) for v in vals), vals)


def integrality_values_closed(Hd: HermitianData, lat: ToroidalLattice) -> tuple:
    """The same three numbers from (Im b, Im(b tau), Im(a tau + b p tau + conj(b) q))."""
    b, tau, p, q = complex(Hd.b), lat.tau, lat.p, lat.q
    return (b.imag, (b * tau).imag, (Hd.a * tau + b * p * tau + b.conjugate() * q).imag)


def semicharacter_extend(rho: SemiCharacter, Hd: HermitianData, lat: ToroidalLattice,
                         k: Sequence[int], order: Sequence[int] = (0, 1, 2),
                         strict: bool = True, tol: float = DEFAULT_TOL) -> complex:
    """rho on k1 lambda1 + k2 lambda2 + k3 lambda3.

    The blocks k_i lambda_i are added one at a time in ``order`` using
    rho(l + m) = rho(l) rho(m) exp(pi i Im H(l, m)); rho(k lambda) = rho(lambda)**k
    because Im H(lambda, lambda) = 0.
    """
    if strict and not integrality_check(Hd, lat, tol).ok:
        raise NotIntegral(integrality_check(Hd, lat, tol).values)
    return cmath.exp(semicharacter_log(rho, Hd, lat, k, order))


def semicharacter_log(rho, Hd, lat, k, order=(0, 1, 2)) -> complex:
    E = _imH_table(Hd, lat)
    logs = [cmath.log(r) for r in rho.values()]
    acc = 0j
    done: list[int] = []
    for i in order:
        if not k[i]:
            continue
        block = k[i] * logs[i]
        cross = sum(k[j] * E[j, i] for j in done) * k[i]
        acc += block + 1j * math.pi * cross
        done.append(i)
    return acc


def cocycle_log(Hd, rho, lat, lam: Sequence[int], x: Sequence[complex],
                strict: bool = True, tol: float = DEFAULT_TOL) -> complex:
    """log alpha_lambda(x) (defined modulo 2 pi i)."""
    if strict and not integrality_check(Hd, lat, tol).ok:
        raise NotIntegral(integrality_check(Hd, lat, tol).values)
    v = lat.vector(lam)
    return (semicharacter_log(rho, Hd, lat, lam)
            + math.pi * hermitian_pairing(Hd, x, v) + 0.5 * math.pi * hermitian_pairing(Hd, v, v))


def cocycle_eval(Hd, rho, lat, lam, x, strict: bool = True, tol: float = DEFAULT_TOL) -> complex:
    """alpha_lambda(x) = rho(lambda) exp(pi H(x, lambda) + pi/2 H(lambda, lambda))."""
    return cmath.exp(cocycle_log(Hd, rho, lat, lam, x, strict, tol))


def cocycle_defect(Hd, rho, lat, lam, mu, x, strict: bool = True) -> float:
    """|alpha_{l+m}(x) / (alpha_l(x+m) alpha_m(x)) - 1|, evaluated in log form."""
    lam, mu = list(lam), list(mu)
    s = [a + b for a, b in zip(lam, mu)]
    xm = np.asarray(x, complex) + lat.vector(mu)
    d = (cocycle_log(Hd, rho, lat, s, x, strict)
         - cocycle_log(Hd, rho, lat, lam, xm, strict)
         - cocycle_log(Hd, rho, lat, mu, x, strict))
    return abs(cmath.exp(d) - 1)


def gauge_beta(c: float, x: Sequence[complex]) -> complex:
    return cmath.exp(-math.pi * c * complex(x[1]) ** 2 / 2)


def gauge_remove_c(Hd: HermitianData) -> tuple[HermitianData, str]:
    """(a, b, 0) together with the gauge factor relating the two cocycles."""
    return (HermitianData(Hd.a, Hd.b, 0.0),
            f"beta(z, eta) = exp(-pi * {Hd.c!r} * eta**2 / 2)")


def gauge_defect(Hd: HermitianData, rho, lat, lam, x) -> float:
    """Relative defect of alpha^{H0}_l(x) = beta(x+l) alpha^H_l(x) / beta(x)."""
    H0, _ = gauge_remove_c(Hd)
    v = lat.vector(lam)
    xl = np.asarray(x, complex) + v
    lhs = cocycle_log(H0, rho, lat, lam, x)
    rhs = (-math.pi * Hd.c * complex(xl[1]) ** 2 / 2 + cocycle_log(Hd, rho, lat, lam, x)
           + math.pi * Hd.c * complex(x[1]) ** 2 / 2)
    return abs(cmath.exp(lhs - rhs) - 1)


def metric_norm(Hd: HermitianData, x: Sequence[complex], zeta: complex) -> float:
    """|zeta|^2_{h, x} = exp(-pi H(x, x)) |zeta|^2."""
    return math.exp(-math.pi * hermitian_pairing(Hd, x, x).real) * abs(zeta) ** 2


def metric_defect(Hd, rho, lat, lam, x, zeta) -> float:
    """Relative change of the pointwise norm under the deck action of lambda."""
    v = lat.vector(lam)
    xl = np.asarray(x, complex) + v
    # log |alpha zeta|^2_{x+l} - log |zeta|^2_x, to avoid overflow
    la = cocycle_log(Hd, rho, lat, lam, x, strict=False)
    d = (2 * la.real - math.pi * hermitian_pairing(Hd, xl, xl).real
         + math.pi * hermitian_pairing(Hd, x, x).real)
    return abs(math.expm1(d))


def curvature_form(Hd: HermitianData) -> dict:
    """Coefficients of Theta = pi (a dz^dzbar + b dz^detabar + conj(b) deta^dzbar)."""
    if Hd.c != 0:
        raise CNotRemoved()
    return {"dz^dzbar": math.pi * Hd.a, "dz^detabar": math.pi * complex(Hd.b),
            "deta^dzbar": math.pi * complex(Hd.b).conjugate()}


def intersection_numbers(Hd: HermitianData, lat: ToroidalLattice, tol: float = 1e-9) -> tuple:
    """(I_ab, I_bg, I_ga) from the closed forms, cross-checked against Im H(x_., x_.)."""
    if Hd.c != 0:
        raise CNotRemoved()
    b, tau, p, q = complex(Hd.b), lat.tau, lat.p, lat.q
    closed = (Hd.a * tau.imag + p * (b * tau).imag - q * b.imag, -(b * tau).imag, -b.imag)
    xa, xb, xg = [1, p], [tau, q], [0, 1]
    via_H = (hermitian_pairing(Hd, xb, xa).imag, hermitian_pairing(Hd, xg, xb).imag,
             hermitian_pairing(Hd, xg, xa).imag)
    scale = 1 + max(abs(v) for v in closed)
    if any(abs(u - v) > tol * scale for u, v in zip(closed, via_H)):
        raise ArithmeticError(f"closed forms {closed} disagree with Im H {via_H}")
    return closed


def cycle_map(lat: ToroidalLattice, cycle: str, w0_modulus: float):
    """Parameterisation (s, t) -> (z, w) of the 2-cycle, in its orientation order.

    ab: (alpha, beta), bg: (beta, gamma), ga: (alpha, gamma).
    """
    tau, p, q = lat.tau, lat.p, lat.q
    e = lambda t: cmath.exp(2j * math.pi * t)  # noqa: E731
    if cycle == "ab":
        return lambda s, t: (s + tau * t, e(s * p) * e(t * q) * w0_modulus)
    if cycle == "bg":
        return lambda s, t: (s * tau, e(s * q) * e(t) * w0_modulus)
    if cycle == "ga":
        return lambda s, t: (s, e(s * p) * e(t) * w0_modulus)
    raise ValueError(f"cycle must be one of {CYCLES}")


def integrate_chern_cycle(Hd: HermitianData, lat: ToroidalLattice, cycle: str,
                          w0_modulus: float = 1.0, grid: int = 16) -> float:
    """Midpoint-rule integral of (i/2 pi) Theta over a cycle.

    The tangent vectors are obtained by central differences of the
    parameterisation in (z, w) coordinates, with eta = log(w) / (2 pi i)
    differentiated through the ratio w(+h)/w(-h).
    """
    if grid < 16:
        raise ValueError("grid must be >= 16")
    if Hd.c != 0:
        raise CNotRemoved()
    f = cycle_map(lat, cycle, w0_modulus)
    a, b = Hd.a, complex(Hd.b)
    bc = b.conjugate()
    h = 1e-5
    total = 0.0
    for i in range(grid):
        s = (i + 0.5) / grid
        for j in range(grid):
            t = (j + 0.5) / grid
            zs = (f(s + h, t)[0] - f(s - h, t)[0]) / (2 * h)
            zt = (f(s, t + h)[0] - f(s, t - h)[0]) / (2 * h)
            es = cmath.log(f(s + h, t)[1] / f(s - h, t)[1]) / (2j * math.pi * 2 * h)
            et = cmath.log(f(s, t + h)[1] / f(s, t - h)[1]) / (2j * math.pi * 2 * h)
            dzdzb = zs * zt.conjugate() - zt * zs.conjugate()
            dzdeb = zs * et.conjugate() - zt * es.conjugate()
            dedzb = es * zt.conjugate() - et * zs.conjugate()
            form = (1j / 2) * (a * dzdzb + b * dzdeb + bc * dedzb)
            total += form.real
    return total / grid ** 2


def is_extendable(Hd: HermitianData, lat: ToroidalLattice | None = None, tol: float = DEFAULT_TOL) -> bool:
    """b = 0.  With a lattice given, also asserts agreement with I_bg = I_ga = 0."""
    if Hd.c != 0:
        raise CNotRemoved()
    ext = abs(complex(Hd.b)) <= tol
    if lat is not None:
        _, ibg, iga = intersection_numbers(Hd, lat)
        other = abs(ibg) <= tol and abs(iga) <= tol
        if other != ext:
            raise ArithmeticError("b = 0 and vanishing of (I_bg, I_ga) disagree")
    return ext


def admissible_hermitian(lat: ToroidalLattice, n1: int, n2: int, n3: int) -> HermitianData:
    """The unique (a, b) with c = 0 whose integrality values are (n1, n2, n3)."""
    tau, p, q = lat.tau, lat.p, lat.q
    b = complex((n2 - n1 * tau.real) / tau.imag, n1)
    a = (n3 - p * n2 + q * n1) / tau.imag
    return HermitianData(a, b, 0.0)


def random_admissible(lat: ToroidalLattice, rng: np.random.Generator, bound: int = 5) -> HermitianData:
    n = rng.integers(-bound, bound + 1, size=3)
    return admissible_hermitian(lat, int(n[0]), int(n[1]), int(n[2]))
