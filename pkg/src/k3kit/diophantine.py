"""Diophantine pairs, approximation exponents and the Pic0 small denominator.

For a pair (p, q) the level-n quantity

    delta_n = min_{mu, nu in Z} |n (p + i q) - (mu + i nu)|

is computed from the centred residuals of n*p and n*q.  Those residuals
come from an exact 128-bit fixed-point recurrence (see ``k3kit._core``), so
the scan is reliable to well below any delta we can observe at n <= 10**7.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath
import numpy as np

from ._core import fixed128, kernels
from .errors import TorsionHit

DEN_MAX = 10 ** 6


class Classification(str, enum.Enum):
    TORSION = "Torsion"
    NON_TORSION = "NonTorsion"
    UNDECIDED = "Undecided"


def default_precision() -> int:
    """Working precision in bits selected by ``K3KIT_PRECISION``."""
    mode = os.environ.get("K3KIT_PRECISION", "mp128").lower()
    if mode == "double":
        return 53
    if mode == "mp128":
        return 128
    raise ValueError(f"K3KIT_PRECISION must be 'double' or 'mp128', got {mode!r}")


@dataclass(frozen=True)
class DiophantinePair:
    """A pair (p, q) together with how exactly it is known.

    ``exactness`` is ``"rational"`` (p and q are Fractions) or ``"decimal"``
    (p and q are mpmath numbers good to ``precision`` bits).
    """

    p: object
    q: object
    exactness: str = "decimal"
    precision: int = 128

    def __post_init__(self):
        if self.exactness not in ("rational", "decimal"):
            raise ValueError("exactness must be 'rational' or 'decimal'")
        if self.exactness == "rational":
            object.__setattr__(self, "p", Fraction(self.p))
            object.__setattr__(self, "q", Fraction(self.q))
        else:
            with mpmath.workprec(self.precision):
                object.__setattr__(self, "p", +mpmath.mpf(self.p))
                object.__setattr__(self, "q", +mpmath.mpf(self.q))

    @classmethod
    def rational(cls, p, q) -> "DiophantinePair":
        return cls(Fraction(p), Fraction(q), "rational", 0)

    @classmethod
    def decimal(cls, p, q, precision: int | None = None) -> "DiophantinePair":
        precision = precision or default_precision()
        with mpmath.workprec(precision):
            return cls(mpmath.mpf(p), mpmath.mpf(q), "decimal", precision)

    @classmethod
    def parse(cls, p: str, q: str, exact: bool = False, precision: int | None = None):
        """Build a pair from expression strings such as ``"1/2"`` or ``"sqrt(2)-1"``."""
        if exact:
            return cls.rational(parse_rational(p), parse_rational(q))
        precision = precision or default_precision()
        return cls(parse_real(p, precision), parse_real(q, precision), "decimal", precision)

    @property
    def is_rational(self) -> bool:
        return self.exactness == "rational"

    def as_float(self) -> tuple[float, float]:
        return float(self.p), float(self.q)

    def fixed(self) -> tuple[int, int, int, int]:
        """128-bit fixed-point halves (p_hi, p_lo, q_hi, q_lo) of frac(p), frac(q)."""
        return (*fixed128(self.p), *fixed128(self.q))

    def torsion_level(self) -> int | None:
        """Least n with n*p, n*q integral (rational pairs only)."""
        if not self.is_rational:
            return None
        a, b = self.p.denominator, self.q.denominator
        return a * b // math.gcd(a, b)

    def to_json(self):
        if self.is_rational:
            return {"p": _frac_str(self.p), "q": _frac_str(self.q), "exact": True}
        return {"p": mpmath.nstr(self.p, 40), "q": mpmath.nstr(self.q, 40),
                "exact": False, "precision": self.precision}


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text) -> Fraction:
    import sympy

    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    val = sympy.sympify(str(text), rational=True)
    if not val.is_Rational:
        raise ValueError(f"{text!r} is not an exact rational")
    return Fraction(int(val.p), int(val.q))


def parse_real(text, precision: int = 128):
    """Evaluate a real expression string to ``precision`` bits."""
    import sympy

    if isinstance(text, (float, int)):
        with mpmath.workprec(precision):
            return +mpmath.mpf(text)
    expr = sympy.sympify(str(text), rational=True)
    digits = int(precision * math.log10(2)) + 10
    val = sympy.N(expr, digits)
    if not val.is_real:
        raise ValueError(f"{text!r} is not real")
    with mpmath.workprec(precision):
        return +mpmath.mpf(str(val))


def liouville_number(base: int = 10, precision: int = 128):
    """sum_{k>=1} base**(-k!) to ``precision`` bits."""
    with mpmath.workprec(precision + 16):
        total = mpmath.mpf(0)
        k = 1
        while math.factorial(k) * math.log2(base) < precision + 16:
            total += mpmath.mpf(base) ** (-math.factorial(k))
            k += 1
    with mpmath.workprec(precision):
        return +total


def comparison_tolerance(precision: int) -> float:
    """Relative tolerance used for decimal inputs (2**-50 at 128 bits)."""
    return 2.0 ** -(precision * 50 // 128)


def resolvable_denominator(precision: int) -> int:
    """Largest d such that distinct rationals with denominators <= d are
    separated by more than twice the input tolerance (capped at 10**6)."""
    tol = comparison_tolerance(precision)
    return max(1, min(DEN_MAX, int(math.isqrt(int(1 / (2 * tol))))))


def _reconstruct(x, precision: int) -> Fraction | None:
    with mpmath.workprec(precision + 8):
        m, e = mpmath.mpf(x).man_exp
        exact = Fraction(int(m)) * (Fraction(2) ** int(e))
    best = exact.limit_denominator(resolvable_denominator(precision))
    tol = comparison_tolerance(precision) * max(1.0, abs(float(exact)))
    if abs(float(exact - best)) <= tol:
        return best
    return None


def classify_pair(pair: DiophantinePair) -> Classification:
    """Torsion / NonTorsion / Undecided.

    Rational pairs are always torsion.  Decimal pairs are reconstructed by
    continued fractions up to denominator 10**6 (fewer when the precision
    cannot separate rationals that close); if both coordinates match a
    rational the pair is Torsion.  Otherwise the answer is NonTorsion only
    when the whole range up to 10**6 was resolvable, else Undecided.
    """
    if pair.is_rational:
        return Classification.TORSION
    rp = _reconstruct(pair.p, pair.precision)
    rq = _reconstruct(pair.q, pair.precision)
    if rp is not None and rq is not None:
        return Classification.TORSION
    if resolvable_denominator(pair.precision) >= DEN_MAX:
        return Classification.NON_TORSION
    return Classification.UNDECIDED


def residuals(pair: DiophantinePair, n_start: int, n_stop: int) -> tuple[np.ndarray, np.ndarray]:
    """Centred residuals (n p - round(n p), n q - round(n q)) for n in [n_start, n_stop)."""
    return kernels.residual_scan(*pair.fixed(), n_start, n_stop)


def delta_scan(pair: DiophantinePair, n_max: int) -> np.ndarray:
    """delta_n for n = 1..n_max (index n-1)."""
    rp, rq = residuals(pair, 1, n_max + 1)
    return np.hypot(rp, rq)


def delta_exact(pair: DiophantinePair, n: int) -> float:
    """delta_n by exact rational arithmetic (rational pairs) or mpmath."""
    if pair.is_rational:
        a = n * pair.p - round(n * pair.p)
        b = n * pair.q - round(n * pair.q)
        return math.hypot(float(a), float(b))
    with mpmath.workprec(pair.precision + 32):
        a = n * pair.p - mpmath.nint(n * pair.p)
        b = n * pair.q - mpmath.nint(n * pair.q)
        return float(mpmath.hypot(a, b))


@dataclass
class ExponentReport:
    n_max: int
    delta: np.ndarray = field(repr=False)
    alpha_hat: float
    A_hat: float
    argmax_n: int = 0

    def bound(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.float64)
        return self.A_hat * n ** (-self.alpha_hat)

    def holds(self) -> bool:
        n = np.arange(1, self.n_max + 1)
        return bool(np.all(self.delta >= self.bound(n)))

    def table(self, limit: int | None = None) -> list[tuple[int, float]]:
        m = self.n_max if limit is None else min(limit, self.n_max)
        return [(i + 1, float(self.delta[i])) for i in range(m)]


def approximation_exponent(pair: DiophantinePair, n_max: int) -> ExponentReport:
    """Empirical Diophantine exponent of ``pair`` over 1 <= n <= n_max.

    alpha_hat = max_{2<=n<=n_max} log(1/delta_n)/log n and
    A_hat = min_n delta_n n**alpha_hat, nudged down by a few ulps so that
    ``delta_n >= A_hat n**-alpha_hat`` holds exactly in floating point.
    Raises TorsionHit when delta_n = 0 for some n <= n_max.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    level = pair.torsion_level()
    if level is not None and level <= n_max:
        raise TorsionHit(level)
    delta = delta_scan(pair, n_max)
    zero = np.flatnonzero(delta == 0.0)
    if zero.size:
        raise TorsionHit(int(zero[0]) + 1)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        ratio = -np.log(delta[1:]) / np.log(n[1:])
    k = int(np.argmax(ratio))
    alpha = float(ratio[k])
    A = float(np.min(delta * n ** alpha))
    report = ExponentReport(n_max, delta, alpha, A, argmax_n=k + 2)
    for _ in range(64):
        if report.holds():
            break
        report.A_hat = float(np.nextafter(report.A_hat, 0.0)) * (1 - 2 ** -52)
    return report


def running_alpha(pair: DiophantinePair, checkpoints: Iterable[int]) -> list[tuple[int, float]]:
    """alpha_hat evaluated at increasing n_max (one scan up to the largest)."""
    checkpoints = sorted(checkpoints)
    delta = delta_scan(pair, checkpoints[-1])
    n = np.arange(2, checkpoints[-1] + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        ratio = -np.log(delta[1:]) / np.log(n)
    running = np.maximum.accumulate(ratio)
    return [(c, float(running[c - 2])) for c in checkpoints]


# ---------------------------------------------------------------------------
# Pic0 distance on C / <1, tau>


def norm_constants(tau: complex) -> tuple[float, float]:
    """(c1, c2): singular values of the real map (x_p, x_q) -> x_q - x_p tau.

    They give c1 * delta_n <= pic0_distance(tau, pair, n) <= c2 * delta_n.
    """
    T = np.array([[-tau.real, 1.0], [-tau.imag, 0.0]])
    s = np.linalg.svd(T, compute_uv=False)
    return float(s[-1]), float(s[0])


def lattice_distance(tau: complex, z: complex) -> float:
    """min over integers (mu, nu) of |z - (mu + nu tau)|, by exhaustive search.

    The search disc has radius |z - z0| where z0 is the lattice point given by
    rounding the lattice coordinates of z; every lattice point in that disc
    is visited, so the minimum is exact.
    """
    y = z.imag / tau.imag
    x = z.real - y * tau.real
    nu0, mu0 = round(y), round(x)
    r = abs(z - (mu0 + nu0 * tau))
    best = r
    span = int(math.floor(r / tau.imag)) + 1
    for nu in range(nu0 - span, nu0 + span + 1):
        w = z - nu * tau
        h = abs(w.imag)
        if h > best:
            continue
        half = math.sqrt(max(best * best - h * h, 0.0))
        for mu in range(math.floor(w.real - half), math.ceil(w.real + half) + 1):
            d = abs(w - mu)
            if d < best:
                best = d
    return best


def covering_radius(tau: complex) -> float:
    """Covering radius of the lattice <1, tau> (circumradius of a Delaunay triangle)."""
    # reduce tau to the standard fundamental domain first
    t = complex(tau)
    for _ in range(1000):
        t = complex(t.real - round(t.real), t.imag)
        if abs(t) < 1:
            t = -1 / t
        else:
            break
    a, b, c = 1.0, abs(t), abs(t - 1)
    area = abs(t.imag) / 2
    return a * b * c / (4 * area)


def pic0_distance(tau: complex, pair: DiophantinePair, n: int) -> float:
    """Distance from n(q - p tau) to the lattice <1, tau> in C."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tau = complex(tau)
    if pair.is_rational:
        a = n * pair.q - round(n * pair.q)
        b = n * pair.p - round(n * pair.p)
        rq, rp = float(a), float(b)
    else:
        rp_arr, rq_arr = residuals(pair, n, n + 1)
        rp, rq = float(rp_arr[0]), float(rq_arr[0])
    return lattice_distance(tau, rq - rp * tau)


def pic0_distances(tau: complex, pair: DiophantinePair, n_max: int) -> np.ndarray:
    """pic0_distance for n = 1..n_max."""
    rp, rq = residuals(pair, 1, n_max + 1)
    tau = complex(tau)
    return np.array([lattice_distance(tau, complex(b) - complex(a) * tau) for a, b in zip(rp, rq)])
