"""Charts of W, V_s, M_s and the family V, with the gluing maps.

Exact representation
--------------------
* z is held by its lattice coordinates (x1, x2) as Fractions, z = x1 + x2 tau.
* w is held in polar form: an exact Fraction modulus and an ``Angle``
  base + kp * p + kq * q (in turns) with base a Fraction and kp, kq integers.

Deck transformations only change the integers kp, kq, so |w| is never
touched and w+ w- = s holds exactly.  The charts are

    W+ :  (z, w) ~ (z + 1, e(p) w) ~ (z + tau, e(q) w)
    W- :  (z, w) ~ (z + 1, e(-p) w) ~ (z + tau, e(-q) w)
    V  :  (z, w+, w-) ~ (z + 1, e(p) w+, e(-p) w-) ~ (z + tau, e(q) w+, e(-q) w-)

with e(t) = exp(2 pi i t).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._core import kernels
from .diophantine import DiophantinePair
from .errors import DegreeMismatch, OutOfAnnulus, OutOfRegion, ZeroDegree
from .lattice import SurfaceClass, form

CHARTS = ("Wplus", "Wminus", "Vfamily")
DECK_SIGN = {"Wplus": 1, "Wminus": -1, "Vfamily": 1}


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Angle:
    """base + kp * p + kq * q turns."""

    base: Fraction = Fraction(0)
    kp: int = 0
    kq: int = 0

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.base + other.base, self.kp + other.kp, self.kq + other.kq)

    def __neg__(self) -> "Angle":
        return Angle(-self.base, -self.kp, -self.kq)

    def __sub__(self, other: "Angle") -> "Angle":
        return self + (-other)

    def reduced(self) -> "Angle":
        return Angle(self.base % 1, self.kp, self.kq)

    def turns(self, pair: DiophantinePair):
        """Value mod 1; exact Fraction for rational pairs, else float."""
        if pair.is_rational:
            return (self.base + self.kp * pair.p + self.kq * pair.q) % 1
        import mpmath

        with mpmath.workprec(pair.precision + 32):
            v = mpmath.mpf(self.base.numerator) / self.base.denominator + self.kp * pair.p + self.kq * pair.q
            return float(v - mpmath.floor(v))

    def congruent(self, other: "Angle", pair: DiophantinePair, tol: float = 1e-12) -> bool:
        d = self - other
        if d.kp == 0 and d.kq == 0:
            return d.base.denominator == 1
        t = d.turns(pair)
        return min(float(t), 1 - float(t)) <= tol


@dataclass(frozen=True)
class Polar:
    modulus: Fraction
    angle: Angle = Angle()

    @classmethod
    def from_complex(cls, w: complex) -> "Polar":
        w = complex(w)
        t = cmath.phase(w) / (2 * math.pi) if w != 0 else 0.0
        return cls(Fraction(abs(w)), Angle(Fraction(t) % 1))

    def inverse_times(self, s: "Polar") -> "Polar":
        """s / self."""
        return Polar(s.modulus / self.modulus, s.angle - self.angle)

    def times(self, other: "Polar") -> "Polar":
        return Polar(self.modulus * other.modulus, self.angle + other.angle)

    def to_complex(self, pair: DiophantinePair) -> complex:
        return float(self.modulus) * cmath.exp(2j * math.pi * float(self.angle.turns(pair)))


@dataclass(frozen=True)
class GluingConfig:
    tau: complex
    pair: DiophantinePair
    R: Fraction
    s: Polar
    xi: tuple = (Fraction(0), Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "R", _frac(self.R))
        if not isinstance(self.s, Polar):
            object.__setattr__(self, "s", Polar.from_complex(self.s))
        if not isinstance(self.xi, tuple):
            object.__setattr__(self, "xi", self.lattice_coords(complex(self.xi)))
        else:
            object.__setattr__(self, "xi", (_frac(self.xi[0]), _frac(self.xi[1])))
        if self.tau.imag <= 0:
            raise ValueError("Im tau must be positive")
        if self.R <= 1:
            raise ValueError("R must exceed 1")
        if not 0 < self.s.modulus < 1:
            raise ValueError("need 0 < |s| < 1")

    @classmethod
    def build(cls, tau, pair, R, s: complex, xi: complex = 0) -> "GluingConfig":
        return cls(complex(tau), pair, _frac(R), Polar.from_complex(s), complex(xi))

    def lattice_coords(self, z: complex) -> tuple[Fraction, Fraction]:
        x2 = z.imag / self.tau.imag
        x1 = z.real - x2 * self.tau.real
        return Fraction(x1), Fraction(x2)

    def z_complex(self, x: Sequence) -> complex:
        return float(x[0]) + float(x[1]) * self.tau

    @property
    def inner_sq(self) -> Fraction:
        """(sqrt|s| / R)^2."""
        return self.s.modulus / self.R ** 2

    @property
    def outer_sq(self) -> Fraction:
        """(sqrt|s| R)^2."""
        return self.s.modulus * self.R ** 2

    def xi_complex(self) -> complex:
        return self.z_complex(self.xi)


@dataclass(frozen=True)
class ChartPoint:
    chart: str
    z: tuple
    w: Polar
    w_minus: Polar | None = None

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ValueError(f"chart must be one of {CHARTS}")
        object.__setattr__(self, "z", (_frac(self.z[0]), _frac(self.z[1])))
        if (self.chart == "Vfamily") != (self.w_minus is not None):
            raise ValueError("Vfamily points carry (z, w+, w-); W points carry (z, w)")

    @classmethod
    def from_complex(cls, cfg: GluingConfig, chart: str, z: complex, w: complex,
                     w_minus: complex | None = None) -> "ChartPoint":
        wm = None if w_minus is None else Polar.from_complex(w_minus)
        return cls(chart, cfg.lattice_coords(complex(z)), Polar.from_complex(w), wm)

    def w_complex(self, cfg: GluingConfig) -> complex:
        return self.w.to_complex(cfg.pair)


def normalize_point(cfg: GluingConfig, pt: ChartPoint) -> ChartPoint:
    """Move z into the fundamental parallelogram {x1, x2 in [0, 1)}.

    The fibre coordinate is rotated by the matching deck factor; |w| is
    never modified.
    """
    k1 = math.floor(pt.z[0])
    k2 = math.floor(pt.z[1])
    z = (pt.z[0] - k1, pt.z[1] - k2)
    sgn = DECK_SIGN[pt.chart]
    rot = Angle(Fraction(0), -sgn * k1, -sgn * k2)
    w = Polar(pt.w.modulus, (pt.w.angle + rot).reduced())
    wm = None
    if pt.w_minus is not None:
        wm = Polar(pt.w_minus.modulus, (pt.w_minus.angle - rot).reduced())
    return ChartPoint(pt.chart, z, w, wm)


def translate(pt: ChartPoint, k1: int, k2: int) -> ChartPoint:
    """Apply one deck transformation z -> z + k1 + k2 tau to the representative."""
    sgn = DECK_SIGN[pt.chart]
    rot = Angle(Fraction(0), sgn * k1, sgn * k2)
    wm = None if pt.w_minus is None else Polar(pt.w_minus.modulus, pt.w_minus.angle - rot)
    return ChartPoint(pt.chart, (pt.z[0] + k1, pt.z[1] + k2), Polar(pt.w.modulus, pt.w.angle + rot), wm)


def equivalent(cfg: GluingConfig, a: ChartPoint, b: ChartPoint) -> bool:
    """Same point of the quotient (exact in z and |w|, angles compared mod 1)."""
    if a.chart != b.chart:
        return False
    na, nb = normalize_point(cfg, a), normalize_point(cfg, b)
    if na.z != nb.z or na.w.modulus != nb.w.modulus:
        return False
    if not na.w.angle.congruent(nb.w.angle, cfg.pair):
        return False
    if na.w_minus is not None:
        return (na.w_minus.modulus == nb.w_minus.modulus
                and na.w_minus.angle.congruent(nb.w_minus.angle, cfg.pair))
    return True


def region_of(cfg: GluingConfig, pt: ChartPoint) -> set[str]:
    """Tags from |w| (compared through exact squares).

    in_W: |w| < R.  in_Ms: |w| > sqrt|s|/R.  in_Vs: sqrt|s|/R < |w| < sqrt|s| R.
    outside: not in M_s (|w| <= sqrt|s|/R) or not in the chart (|w| >= R).
    """
    if pt.chart == "Vfamily":
        raise ValueError("region_of takes W-chart points")
    m2 = pt.w.modulus ** 2
    tags = set()
    if m2 >= cfg.R ** 2:
        return {"outside"}
    tags.add("in_W")
    if m2 > cfg.inner_sq:
        tags.add("in_Ms")
    else:
        tags.add("outside")
    if cfg.inner_sq < m2 < cfg.outer_sq:
        tags.add("in_Vs")
    return tags


def in_family_domain(cfg: GluingConfig, pt: ChartPoint) -> bool:
    """|w+| < R, |w-| < R, |w+ w-| < 1."""
    R = cfg.R
    a, b = pt.w.modulus, pt.w_minus.modulus
    return a < R and b < R and a * b < 1


def glue_fs(cfg: GluingConfig, pt: ChartPoint) -> ChartPoint:
    """f_s: V_s+ -> V_s-, (z, w) -> (z + xi, s / w), normalised on the minus chart."""
    if pt.chart != "Wplus":
        raise ValueError("glue_fs maps plus-chart points")
    if "in_Vs" not in region_of(cfg, pt):
        raise OutOfAnnulus(f"|w|^2 = {float(pt.w.modulus ** 2)} is not in the annulus")
    z = (pt.z[0] + cfg.xi[0], pt.z[1] + cfg.xi[1])
    return normalize_point(cfg, ChartPoint("Wminus", z, pt.w.inverse_times(cfg.s)))


def glue_fs_inverse(cfg: GluingConfig, pt: ChartPoint) -> ChartPoint:
    if pt.chart != "Wminus":
        raise ValueError("the inverse maps minus-chart points")
    if "in_Vs" not in region_of(cfg, pt):
        raise OutOfAnnulus(f"|w|^2 = {float(pt.w.modulus ** 2)} is not in the annulus")
    z = (pt.z[0] - cfg.xi[0], pt.z[1] - cfg.xi[1])
    return normalize_point(cfg, ChartPoint("Wplus", z, pt.w.inverse_times(cfg.s)))


def _family_region(cfg: GluingConfig, w: Polar, s: Polar) -> bool:
    m2 = w.modulus ** 2
    return s.modulus * cfg.R ** 2 < m2 < cfg.R ** 2


def family_chart_map(cfg: GluingConfig, pt: ChartPoint, s: Polar | complex | None = None,
                     strict: bool = True) -> ChartPoint:
    """f+ or f- into the family chart.

    f+ : ((z, w+), s) -> (z, w+, s / w+)
    f- : ((z, w-), s) -> (z - xi, s / w-, w-)

    With ``strict`` the source must lie in {sqrt|s| R < |w| < R}; otherwise
    only membership of the image in V is required.
    """
    s = cfg.s if s is None else (s if isinstance(s, Polar) else Polar.from_complex(s))
    if strict and not _family_region(cfg, pt.w, s):
        raise OutOfRegion("point is not in the source of the family chart map")
    if pt.chart == "Wplus":
        out = ChartPoint("Vfamily", pt.z, pt.w, pt.w.inverse_times(s))
    elif pt.chart == "Wminus":
        z = (pt.z[0] - cfg.xi[0], pt.z[1] - cfg.xi[1])
        out = ChartPoint("Vfamily", z, pt.w.inverse_times(s), pt.w)
    else:
        raise ValueError("family_chart_map takes W-chart points")
    if not in_family_domain(cfg, out):
        raise OutOfRegion("image is not in the family domain")
    return out


def family_chart_inverse(cfg: GluingConfig, pt: ChartPoint, side: str, s: Polar | None = None,
                         strict: bool = True) -> ChartPoint:
    """Inverse of f+ (side 'plus') or f- (side 'minus') on its image."""
    s = cfg.s if s is None else s
    if side == "plus":
        out = ChartPoint("Wplus", pt.z, pt.w)
    elif side == "minus":
        out = ChartPoint("Wminus", (pt.z[0] + cfg.xi[0], pt.z[1] + cfg.xi[1]), pt.w_minus)
    else:
        raise ValueError("side must be 'plus' or 'minus'")
    if strict and not _family_region(cfg, out.w, s):
        raise OutOfRegion("point is not in the image of the family chart map")
    return out


def fiber_value(pt: ChartPoint) -> Polar:
    """w+ w- (the fibration to the disc)."""
    return pt.w.times(pt.w_minus)


@lru_cache(maxsize=1)
def _symbolic_ratio():
    import sympy as sp

    z, w, s, xi = sp.symbols("z w s xi")
    zm = z + xi
    wm = s / w
    J = sp.Matrix([[sp.diff(zm, z), sp.diff(zm, w)], [sp.diff(wm, z), sp.diff(wm, w)]]).det()
    raw = J * w / wm
    return (z, w, s, xi), raw, sp.simplify(raw)


def two_form_jacobian_symbolic():
    """The pulled-back ratio as an exact sympy expression (simplifies to -1)."""
    return _symbolic_ratio()[2]


def two_form_jacobian(cfg: GluingConfig, pt: ChartPoint) -> complex:
    """f_s^*(dz- ^ dw- / w-) / (dz+ ^ dw+ / w+) evaluated at ``pt``.

    The unsimplified symbolic expression is evaluated numerically, so the
    agreement with the exact value -1 is a genuine check.
    """
    if "in_Vs" not in region_of(cfg, pt):
        raise OutOfAnnulus("point is not in V_s")
    f = _lambdified()
    return complex(f(cfg.z_complex(pt.z), pt.w_complex(cfg), cfg.s.to_complex(cfg.pair), cfg.xi_complex()))


@lru_cache(maxsize=1)
def _lambdified():
    import sympy as sp

    syms, raw, _ = _symbolic_ratio()
    return sp.lambdify(syms, raw, "cmath")


# ---------------------------------------------------------------------------
# xi


def p_class(p0, pj: Sequence) -> list:
    """Coefficient vector of 3 p0 H - sum pj Ej (entries complex or symbolic)."""
    if len(pj) != 9:
        raise ValueError("need p1..p9")
    return [3 * p0] + list(pj)


def degree_on_C(L: SurfaceClass) -> int:
    q = L.coefficients
    return 3 * q[0] - sum(q[1:])


def compute_xi(Lplus: SurfaceClass, Lminus: SurfaceClass, points) -> object:
    """xi = ((p- . L-) - (p+ . L+)) / b.

    ``points`` provides ``p0_plus, p0_minus`` and ``pj_plus, pj_minus``
    (sequences p1..p9); entries may be complex numbers or SymbolicScalars.
    """
    b = degree_on_C(Lplus)
    bm = degree_on_C(Lminus)
    if b != bm:
        raise DegreeMismatch(b, bm)
    if b == 0:
        raise ZeroDegree("(L.C) = 0")
    pp = p_class(points.p0_plus, points.pj_plus)
    pm = p_class(points.p0_minus, points.pj_minus)
    num = form(pm, Lminus.coefficients) - form(pp, Lplus.coefficients)
    if isinstance(num, (int, Fraction)):
        return Fraction(num, b)
    if isinstance(num, complex) or isinstance(num, float):
        return num / b
    return num * Fraction(1, b)


# ---------------------------------------------------------------------------
# leaves


@dataclass
class LeafTrace:
    points: np.ndarray
    modulus: Fraction
    moduli: np.ndarray = field(repr=False)
    T: float = 1.0

    @property
    def drift(self) -> float:
        return float(np.max(np.abs(self.moduli - float(self.modulus)))) if len(self.moduli) else 0.0


def leaf_box(n_samples: int) -> float:
    """Half-width T of the sampling box: a power of two near n**(1/3) / 2."""
    return float(2 ** max(0, round(math.log2(max(n_samples, 1) ** (1 / 3) / 2))))


def trace_leaf(cfg: GluingConfig, w0: complex, n_samples: int, seed: int = 0) -> LeafTrace:
    """Sample the leaf F(C) = {[(z, w0)]} through w0 on the plus chart.

    z runs over a square grid in [-T, T]^2 (seeded random offset); each
    sample is normalised and recorded as (x1, x2, arg(w) / 2 pi) in [0, 1)^3.
    """
    w0p = Polar.from_complex(w0)
    m2 = w0p.modulus ** 2
    if not (cfg.inner_sq < m2 < cfg.R ** 2):
        raise OutOfAnnulus("need sqrt|s|/R < |w0| < R")
    rng = np.random.default_rng(seed)
    T = leaf_box(n_samples)
    side = math.ceil(math.sqrt(n_samples))
    h = 2 * T / side
    off = rng.uniform(0, h, size=2)
    ax = -T + off[0] + h * np.arange(side)
    ay = -T + off[1] + h * np.arange(side)
    X, Y = np.meshgrid(ax, ay, indexing="ij")
    X, Y = X.ravel()[:n_samples], Y.ravel()[:n_samples]
    x2 = Y / cfg.tau.imag
    x1 = X - x2 * cfg.tau.real
    theta0 = float(w0p.angle.base % 1)
    pts = kernels.leaf_reduce(x1, x2, theta0, *cfg.pair.fixed())
    moduli = np.full(len(pts), float(w0p.modulus))
    return LeafTrace(pts, w0p.modulus, moduli, T)


def trace_leaf_exact(cfg: GluingConfig, w0: complex, zs: Sequence[complex]) -> list[ChartPoint]:
    """Exact-arithmetic counterpart of trace_leaf for a handful of samples."""
    w = Polar.from_complex(w0)
    return [normalize_point(cfg, ChartPoint("Wplus", cfg.lattice_coords(complex(z)), w)) for z in zs]


_LEVELS = 5
_CELLS = 16


@lru_cache(maxsize=1)
def _aggregator() -> tuple[np.ndarray, np.ndarray]:
    rows, lengths = [], []
    for lev in range(_LEVELS):
        width = _CELLS >> lev
        for j in range(1 << lev):
            r = np.zeros(_CELLS)
            r[j * width:(j + 1) * width] = 1
            rows.append(r)
            lengths.append(1.0 / (1 << lev))
    return np.array(rows), np.array(lengths)


def discrepancy(points: np.ndarray) -> float:
    """max over dyadic boxes (levels 0..4 per axis) of |empirical - volume|."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) == 0:
        raise ValueError("need a nonempty (N, 3) array")
    hist = kernels.dyadic_histogram(pts, _CELLS).astype(np.float64)
    A, lens = _aggregator()
    counts = np.einsum("ai,bj,ck,ijk->abc", A, A, A, hist, optimize=True)
    vol = lens[:, None, None] * lens[None, :, None] * lens[None, None, :]
    return float(np.max(np.abs(counts / len(pts) - vol)))


def max_gaps(points: np.ndarray) -> tuple[float, float, float]:
    """Largest circular gap between sorted values, per coordinate."""
    out = []
    for k in range(3):
        v = np.sort(np.asarray(points)[:, k])
        gaps = np.diff(np.concatenate([v, [v[0] + 1.0]]))
        out.append(float(gaps.max()))
    return tuple(out)


def torsion_floor(cfg: GluingConfig, w0: complex) -> float:
    """Lower bound for the discrepancy of any leaf sample of a torsion pair.

    The third coordinate then only takes the values theta0 + j / L, L the
    order of the subgroup generated by p and q in Q/Z.  A full-width box
    whose dyadic theta-interval avoids all of them has empirical mass 0, so
    the discrepancy is at least its volume.
    """
    pair = cfg.pair
    if not pair.is_rational:
        return 0.0
    L = pair.torsion_level()
    theta0 = Polar.from_complex(w0).angle.base % 1
    vals = [(theta0 + Fraction(j, L)) % 1 for j in range(L)]
    best = 0.0
    for lev in range(_LEVELS):
        for j in range(1 << lev):
            lo, hi = Fraction(j, 1 << lev), Fraction(j + 1, 1 << lev)
            if not any(lo <= v < hi for v in vals):
                best = max(best, 1.0 / (1 << lev))
    return best


def distinct_values(x: np.ndarray, tol: float = 1e-9) -> int:
    """Number of clusters of circle values separated by more than ``tol``."""
    v = np.sort(np.mod(np.asarray(x, dtype=np.float64), 1.0))
    if len(v) == 0:
        return 0
    gaps = np.diff(v) > tol
    count = 1 + int(np.sum(gaps))
    if count > 1 and (v[0] + 1.0 - v[-1]) <= tol:
        count -= 1
    return count
