"""The holomorphic 2-form as a period vector and the Chern class of L+ v L-.

Points p_j^{+-} on C ~ C/<1, tau> are complex numbers (numeric mode) or
``SymbolicScalar`` symbols (symbolic mode).  In both modes p9^{+-} is
eliminated through 9 p0 - sum_j pj = +-mu, so that relation holds exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .diophantine import DiophantinePair
from .errors import DegreeMismatch, NoIndependenceDeclared, NonIntegralProjection, TorrelationViolated
from .exact import ONE, SymbolicScalar, integer_kernel, matvec, solve_rational
from .gluing import compute_xi, degree_on_C
from .lattice import (C_LABELS, MARKED_LABELS, MarkedClass, SurfaceClass, c_gram_inverse,
                      decompose_surface_class, intersect_marked, intersect_surface)

__all__ = [
    "GeometryParams", "degree_on_C", "c_coefficients", "sigma_vector", "chern_class",
    "verify_sigma_orthogonality", "generic_picard_lattice", "constraint_matrix",
    "random_degree_matched_pair", "DEFAULT_INDEPENDENT",
]

_SIGN = {"plus": 1, "minus": -1}


def _sym(name):
    return SymbolicScalar.symbol(name)


@dataclass(frozen=True)
class GeometryParams:
    """Blow-up centres, periods and the gluing parameter.

    ``p_plus``/``p_minus`` hold p1..p9.  ``xi`` may be None, in which case
    it is fixed from a pair (L+, L-) by ``with_xi``.
    """

    tau: object
    mu: object
    p0_plus: object
    p0_minus: object
    p_plus: tuple
    p_minus: tuple
    x: object
    y: object
    s: complex = 1e-6
    xi: object = None
    pair: DiophantinePair | None = None

    def __post_init__(self):
        for name in ("p_plus", "p_minus"):
            v = tuple(getattr(self, name))
            if len(v) != 9:
                raise ValueError(f"{name} needs p1..p9")
            object.__setattr__(self, name, v)

    @property
    def symbolic(self) -> bool:
        return isinstance(self.mu, SymbolicScalar)

    # the names used by compute_xi
    @property
    def pj_plus(self):
        return self.p_plus

    @property
    def pj_minus(self):
        return self.p_minus

    @classmethod
    def symbols(cls, s: complex = 1e-6) -> "GeometryParams":
        """Fully symbolic parameters; p9 is eliminated through the relation."""
        mu = _sym("mu")
        pts = {}
        for side, tag in (("plus", "+"), ("minus", "-")):
            p0 = _sym(f"p0{tag}")
            pj = [_sym(f"p{j}{tag}") for j in range(1, 9)]
            p9 = 9 * p0 - sum(pj, SymbolicScalar()) - _SIGN[side] * mu
            pts[side] = (p0, tuple(pj) + (p9,))
        return cls(_sym("tau"), mu, pts["plus"][0], pts["minus"][0], pts["plus"][1], pts["minus"][1],
                   _sym("x"), _sym("y"), s)

    @classmethod
    def numeric(cls, tau: complex, pair: DiophantinePair, p0_plus: complex, p0_minus: complex,
                p_plus: Sequence[complex], p_minus: Sequence[complex], x: complex = 0.0,
                y: complex = 0.0, s: complex = 1e-6, xi: complex | None = None) -> "GeometryParams":
        """mu = q - p tau; p9 is completed from p1..p8 unless all nine are given."""
        p, q = pair.as_float()
        mu = complex(q - p * tau)
        pts = {}
        for side, p0, pj in (("plus", p0_plus, p_plus), ("minus", p0_minus, p_minus)):
            pj = [complex(v) for v in pj]
            if len(pj) == 8:
                pj.append(9 * p0 - sum(pj) - _SIGN[side] * mu)
            pts[side] = tuple(pj)
        return cls(complex(tau), mu, complex(p0_plus), complex(p0_minus), pts["plus"], pts["minus"],
                   complex(x), complex(y), s, xi, pair)

    def torrelation_residual(self, side: str):
        p0 = self.p0_plus if side == "plus" else self.p0_minus
        pj = self.p_plus if side == "plus" else self.p_minus
        total = 9 * p0
        for v in pj:
            total = total - v
        return total - _SIGN[side] * self.mu

    def check_torrelation(self, tol: float = 1e-12) -> None:
        for side, tag in (("plus", "+"), ("minus", "-")):
            r = self.torrelation_residual(side)
            bad = (not r.is_zero()) if isinstance(r, SymbolicScalar) else abs(r) > tol
            if bad:
                raise TorrelationViolated(tag, r)

    def with_xi(self, Lplus: SurfaceClass, Lminus: SurfaceClass, shift=0) -> "GeometryParams":
        """xi fixed by g_xi^*(L-|C-) = L+|C+, plus an optional perturbation."""
        return replace(self, xi=compute_xi(Lplus, Lminus, self) + shift)

    def values(self) -> dict:
        """Symbol values for evaluating a symbolic quantity at these numbers."""
        out = {"tau": self.tau, "mu": self.mu, "x": self.x, "y": self.y,
               "p0+": self.p0_plus, "p0-": self.p0_minus}
        for j in range(8):
            out[f"p{j + 1}+"] = self.p_plus[j]
            out[f"p{j + 1}-"] = self.p_minus[j]
        if self.xi is not None:
            out["xi"] = self.xi
        return out


@dataclass(frozen=True)
class Coefficients:
    plus: tuple
    minus: tuple
    c9_minus: object
    degenerate: bool

    def as_dict(self) -> dict:
        out = {f"c+{k}": v for k, v in zip(C_LABELS, self.plus)}
        out.update({f"c-{k}": v for k, v in zip(C_LABELS, self.minus)})
        out["c9-"] = self.c9_minus
        return out


def _is_zero(v) -> bool:
    return v.is_zero() if isinstance(v, SymbolicScalar) else abs(v) == 0


def c_coefficients(params: GeometryParams, tol: float = 1e-12) -> Coefficients:
    """c_{v,v+1} = +-(p_v - p_{v+1}), c_678 = +-(-3p0 + p6 + p7 + p8), c9- = p9+ + xi - p9-."""
    params.check_torrelation(tol)
    blocks = {}
    for side in ("plus", "minus"):
        sg = _SIGN[side]
        p0 = params.p0_plus if side == "plus" else params.p0_minus
        pj = params.p_plus if side == "plus" else params.p_minus
        vals = [sg * (pj[v] - pj[v + 1]) for v in range(7)]
        vals.append(sg * (pj[5] + pj[6] + pj[7] - 3 * p0))
        blocks[side] = tuple(vals)
    xi = params.xi if params.xi is not None else (_sym("xi") if params.symbolic else 0j)
    c9 = params.p_plus[8] + xi - params.p_minus[8]
    degenerate = _is_zero(params.mu) if not params.symbolic else params.mu.is_zero()
    return Coefficients(blocks["plus"], blocks["minus"], c9, degenerate)


def sigma_vector(params: GeometryParams) -> MarkedClass:
    """sigma in the marked basis.

    The numbers c_* are periods of sigma over the cycles C_*, so the
    coordinates on each C-block are G^{-1} c (G the block Gram matrix).  On
    the minus block the sign convention of the basis adds a global -1.
    """
    c = c_coefficients(params)
    Ginv = c_gram_inverse()
    plus = matvec(Ginv, c.plus)
    minus = [-v for v in matvec(Ginv, c.minus)]
    head = [2 * params.mu + c.c9_minus, params.mu, params.x, params.tau, params.y, 1]
    return MarkedClass(tuple(head + list(plus) + list(minus)))


def _n9(L: SurfaceClass) -> int:
    return intersect_surface(L, SurfaceClass.E(9, L.side))


def chern_class(Lplus: SurfaceClass, Lminus: SurfaceClass) -> MarkedClass:
    """c1(L+ v L-) = (2b + n9+ + n9-) A_ab + b B_g + L+|C+ + L-|C-."""
    Lplus = Lplus.on_side("plus")
    Lminus = Lminus.on_side("minus")
    b, bm = degree_on_C(Lplus), degree_on_C(Lminus)
    if b != bm:
        raise DegreeMismatch(b, bm)
    rests = []
    for L in (Lplus, Lminus):
        _, _, rest = decompose_surface_class(L)
        if any(Fraction(r).denominator != 1 for r in rest):
            raise NonIntegralProjection(f"C-block projection of {L.coefficients} is not integral")
        rests.append([int(r) for r in rest])
    head = [2 * b + _n9(Lplus) + _n9(Lminus), b, 0, 0, 0, 0]
    return MarkedClass(tuple(head + rests[0] + rests[1]))


def verify_sigma_orthogonality(params: GeometryParams, Lplus: SurfaceClass, Lminus: SurfaceClass,
                               xi_shift=0):
    """(sigma . c1(L)) with xi fixed from (L+, L-).

    Symbolic parameters give an exact ``SymbolicScalar`` (expected 0);
    numeric parameters give the absolute residual.
    """
    c1 = chern_class(Lplus, Lminus)
    p = params.with_xi(Lplus.on_side("plus"), Lminus.on_side("minus"), xi_shift)
    r = intersect_marked(sigma_vector(p), c1)
    if p.symbolic:
        return r if isinstance(r, SymbolicScalar) else SymbolicScalar.constant(r)
    return abs(complex(r))


# ---------------------------------------------------------------------------
# generic Picard lattice


DEFAULT_INDEPENDENT = tuple(["tau", "mu", "x", "y", "p0+", "p0-"]
                            + [f"p{j}{t}" for t in "+-" for j in range(1, 9)])


def constraint_matrix(sigma: MarkedClass, independent: Iterable[str]) -> tuple[list[str], list[list[Fraction]]]:
    """Rows indexed by {one} + independent symbols; row k, column i is the
    coefficient of symbol k in (sigma . e_i)."""
    names = [ONE] + [n for n in independent if n != ONE]
    pairings = []
    for lab in MARKED_LABELS:
        v = intersect_marked(sigma, MarkedClass.basis(lab))
        pairings.append(v if isinstance(v, SymbolicScalar) else SymbolicScalar.constant(v))
    stray = set().union(*(v.symbols() for v in pairings)) - set(names)
    if stray:
        raise NoIndependenceDeclared(f"symbols without an independence declaration: {sorted(stray)}")
    return names, [[v.coefficient(n) for v in pairings] for n in names]


@dataclass(frozen=True)
class PicardLattice:
    basis: tuple
    rank: int
    symbols: tuple

    def contains(self, c: MarkedClass) -> bool:
        if not self.basis:
            return all(v == 0 for v in c.coefficients)
        x = solve_rational([b.coefficients for b in self.basis], c.coefficients)
        return x is not None and all(Fraction(t).denominator == 1 for t in x)

    def to_json(self) -> dict:
        return {"rank": self.rank, "symbols": list(self.symbols),
                "basis": [list(b.coefficients) for b in self.basis]}


def generic_picard_lattice(sigma: MarkedClass, independent: Iterable[str] | None) -> PicardLattice:
    """Integer classes e with (sigma . e) = 0 for Q-independent symbols.

    ``independent`` declares which symbols (together with the unit) are
    linearly independent over Q; with an empty declaration the period is
    treated as fully degenerate and no constraint is imposed.
    """
    if independent is None:
        raise NoIndependenceDeclared("declare the Q-independent symbols (may be empty)")
    independent = tuple(independent)
    if not independent:
        basis = [MarkedClass.basis(lab) for lab in MARKED_LABELS]
        return PicardLattice(tuple(basis), 22, ())
    names, A = constraint_matrix(sigma, independent)
    K = integer_kernel(A, 22)
    return PicardLattice(tuple(MarkedClass(tuple(r)) for r in K), len(K), tuple(names[1:]))


def random_degree_matched_pair(rng, bound: int = 20) -> tuple[SurfaceClass, SurfaceClass]:
    """L+ uniform in [-bound, bound]^10; L- likewise with q9 adjusted so the degrees agree.

    Retries until the adjusted coefficient stays in range.
    """
    while True:
        a = [int(v) for v in rng.integers(-bound, bound + 1, size=10)]
        m = [int(v) for v in rng.integers(-bound, bound + 1, size=10)]
        b = 3 * a[0] - sum(a[1:])
        m[9] = 3 * m[0] - sum(m[1:9]) - b
        if -bound <= m[9] <= bound:
            return SurfaceClass(tuple(a), "plus"), SurfaceClass(tuple(m), "minus")


def numeric_draw(rng, pair: DiophantinePair, tau: complex = 1j, rational_points: bool = True) -> GeometryParams:
    """Random numeric parameters; points are small rationals in lattice coordinates."""
    def point():
        if rational_points:
            a, b = (Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 20))) for _ in range(2))
            return complex(float(a) + float(b) * tau)
        return complex(rng.normal() + 1j * rng.normal())

    p0p, p0m = point(), point()
    pp = [point() for _ in range(8)]
    pm = [point() for _ in range(8)]
    x = complex(rng.normal(), rng.normal())
    y = complex(rng.normal(), rng.normal())
    return GeometryParams.numeric(tau, pair, p0p, p0m, pp, pm, x, y)


def period_magnitude(params: GeometryParams) -> float:
    """Scale of the entries of sigma, for relative residuals."""
    vals = [params.mu, params.tau, params.x, params.y, params.p0_plus, params.p0_minus,
            *params.p_plus, *params.p_minus]
    return max(1.0, max(abs(complex(v)) for v in vals))

