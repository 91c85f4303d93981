"""Intersection forms on H2 of the blown-up planes and on the marked K3 lattice.

A ``SurfaceClass`` with coefficients (q0, q1, ..., q9) denotes
q0 H - sum_j qj Ej, so the form is q0 q0' - sum qj qj'.

The marked basis of H2(X, Z) is, in order::

    A_ab, B_g, A_bg, B_a, A_ga, B_b, C+12 ... C+78, C+678, C-12 ... C-678

where C^+ = D and C^- = -D with D_{v,v+1} = E_v - E_{v+1} and
D_678 = -H + E6 + E7 + E8.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import networkx as nx

from .errors import SideMismatch
from .exact import bilinear, det_bareiss, inertia, inverse_rational, matvec

SIDES = ("plus", "minus")
SIGN = {"plus": 1, "minus": -1}

C_LABELS = ["12", "23", "34", "45", "56", "67", "78", "678"]
MARKED_LABELS = (["A_ab", "B_g", "A_bg", "B_a", "A_ga", "B_b"]
                 + [f"C+{c}" for c in C_LABELS] + [f"C-{c}" for c in C_LABELS])
AB_BLOCK = [[0, 1], [1, -2]]


def _check_side(side: str) -> str:
    if side not in SIDES:
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    return side


@dataclass(frozen=True)
class SurfaceClass:
    """Class q0 H - sum qj Ej on the side ``side`` of the construction."""

    coefficients: tuple
    side: str = "plus"

    def __post_init__(self):
        q = tuple(self.coefficients)
        if len(q) != 10:
            raise ValueError("a surface class has 10 coefficients (q0, q1..q9)")
        object.__setattr__(self, "coefficients", q)
        _check_side(self.side)

    @classmethod
    def H(cls, side="plus"):
        return cls((1,) + (0,) * 9, side)

    @classmethod
    def E(cls, j: int, side="plus"):
        if not 1 <= j <= 9:
            raise ValueError("E_j needs 1 <= j <= 9")
        q = [0] * 10
        q[j] = -1
        return cls(tuple(q), side)

    @classmethod
    def C(cls, side="plus"):
        """The anticanonical cubic class 3H - sum Ej."""
        return cls((3,) + (1,) * 9, side)

    @property
    def q0(self):
        return self.coefficients[0]

    def q(self, j: int):
        return self.coefficients[j]

    def __add__(self, other: "SurfaceClass"):
        if other.side != self.side:
            raise SideMismatch("cannot add classes from different sides")
        return SurfaceClass(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)), self.side)

    def __sub__(self, other: "SurfaceClass"):
        return self + other.scale(-1)

    def scale(self, k) -> "SurfaceClass":
        return SurfaceClass(tuple(k * a for a in self.coefficients), self.side)

    def on_side(self, side: str) -> "SurfaceClass":
        return SurfaceClass(self.coefficients, side)


def form(u: Sequence, v: Sequence):
    """q0 q0' - sum qj qj' for raw coefficient vectors (entries may be symbolic)."""
    total = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        total = total - a * b
    return total


def intersect_surface(u: SurfaceClass, v: SurfaceClass) -> int:
    if u.side != v.side:
        raise SideMismatch(f"classes live on different sides ({u.side}, {v.side})")
    return form(u.coefficients, v.coefficients)


def _d_vectors() -> list[tuple]:
    out = []
    for v in range(1, 8):
        q = [0] * 10
        q[v], q[v + 1] = -1, 1
        out.append(tuple(q))
    out.append((-1, 0, 0, 0, 0, 0, -1, -1, -1, 0))
    return out


D_VECTORS = _d_vectors()


def c_basis(side: str) -> list[SurfaceClass]:
    """(C12, ..., C78, C678) on ``side``; the minus side carries a global sign."""
    s = SIGN[_check_side(side)]
    return [SurfaceClass(tuple(s * a for a in d), side) for d in D_VECTORS]


def c_basis_gram(side: str = "plus") -> list[list[int]]:
    B = c_basis(side)
    return [[intersect_surface(u, v) for v in B] for u in B]


def e8_cartan() -> list[list[int]]:
    """Cartan matrix of E8 for the chain 1-...-7 with node 8 attached to node 5."""
    edges = [(i, i + 1) for i in range(6)] + [(4, 7)]
    M = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in edges:
        M[i][j] = M[j][i] = -1
    return M


def _graph(M) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(len(M)))
    for i in range(len(M)):
        for j in range(i + 1, len(M)):
            if M[i][j]:
                g.add_edge(i, j, w=M[i][j])
    return g


def matches_negated_e8(G: Sequence[Sequence[int]]) -> bool:
    """True when G equals -Cartan(E8) after a simultaneous permutation."""
    if len(G) != 8 or any(G[i][i] != -2 for i in range(8)):
        return False
    negE8 = [[-x for x in row] for row in e8_cartan()]
    return nx.is_isomorphic(_graph(G), _graph(negE8),
                            edge_match=lambda a, b: a["w"] == b["w"])


def is_negative_definite(G: Sequence[Sequence[int]]) -> bool:
    n = len(G)
    neg = [[-x for x in row] for row in G]
    return all(det_bareiss([row[:k] for row in neg[:k]]) > 0 for k in range(1, n + 1))


@dataclass(frozen=True)
class K3Gram:
    gram: tuple
    signature: tuple
    det: int
    even: bool
    e8_check: bool


@lru_cache(maxsize=None)
def _k3_gram() -> tuple:
    G = [[0] * 22 for _ in range(22)]
    for k in range(3):
        for i in range(2):
            for j in range(2):
                G[2 * k + i][2 * k + j] = AB_BLOCK[i][j]
    for off, side in ((6, "plus"), (14, "minus")):
        Cg = c_basis_gram(side)
        for i in range(8):
            for j in range(8):
                G[off + i][off + j] = Cg[i][j]
    return tuple(tuple(r) for r in G)


def k3_gram() -> list[list[int]]:
    return [list(r) for r in _k3_gram()]


def gram_matrix_k3() -> K3Gram:
    """The 22x22 Gram matrix with its signature, determinant, parity and E8 check."""
    G = k3_gram()
    pos, neg, zero = inertia(G)
    blocks_ok = all(
        matches_negated_e8(c_basis_gram(s)) and is_negative_definite(c_basis_gram(s))
        and det_bareiss(c_basis_gram(s)) == 1
        for s in SIDES
    )
    return K3Gram(
        gram=_k3_gram(),
        signature=(pos, neg) if zero == 0 else (pos, neg, zero),
        det=det_bareiss(G),
        even=all(G[i][i] % 2 == 0 for i in range(22)),
        e8_check=blocks_ok,
    )


@dataclass(frozen=True)
class MarkedClass:
    """A 22-vector in the marked basis (entries integers, or symbolic for periods)."""

    coefficients: tuple

    def __post_init__(self):
        c = tuple(self.coefficients)
        if len(c) != 22:
            raise ValueError("a marked class has 22 coefficients")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def basis(cls, label: str) -> "MarkedClass":
        c = [0] * 22
        c[MARKED_LABELS.index(label)] = 1
        return cls(tuple(c))

    @classmethod
    def zero(cls) -> "MarkedClass":
        return cls((0,) * 22)

    def __getitem__(self, label: str):
        return self.coefficients[MARKED_LABELS.index(label)]

    def __add__(self, other):
        return MarkedClass(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other):
        return MarkedClass(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def scale(self, k):
        return MarkedClass(tuple(k * a for a in self.coefficients))

    def as_dict(self) -> dict:
        return dict(zip(MARKED_LABELS, self.coefficients))


def intersect_marked(u: MarkedClass, v: MarkedClass):
    """u^T G v.  Entries of one argument may be SymbolicScalars."""
    return bilinear(u.coefficients, _k3_gram(), v.coefficients)


@lru_cache(maxsize=None)
def _c_gram_inverse() -> tuple:
    return tuple(tuple(r) for r in inverse_rational(c_basis_gram("plus")))


def c_gram_inverse() -> list[list[Fraction]]:
    return [list(r) for r in _c_gram_inverse()]


def decompose_surface_class(q: SurfaceClass) -> tuple[int, int, list[Fraction]]:
    """Split q as cC * C + cE9 * E9 + sum rest_i C_i (C_i the side's C basis).

    cC = 3 q0 - sum_{j<=8} qj and cE9 = 3 q0 - sum_{j<=9} qj; the remainder is
    orthogonal to C and E9 and is expanded in the C basis over Q.  The
    reconstruction is verified exactly before returning.
    """
    v = q.coefficients
    cC = 3 * v[0] - sum(v[1:9])
    cE9 = 3 * v[0] - sum(v[1:10])
    Cv = SurfaceClass.C().coefficients
    E9 = SurfaceClass.E(9).coefficients
    r = [v[i] - cC * Cv[i] - cE9 * E9[i] for i in range(10)]
    basis = c_basis(q.side)
    pair = [form(r, b.coefficients) for b in basis]
    rest = matvec(c_gram_inverse(), pair)
    recon = [sum((rest[k] * basis[k].coefficients[i] for k in range(8)), Fraction(0)) for i in range(10)]
    if recon != [Fraction(x) for x in r]:
        raise ArithmeticError("decomposition failed to reconstruct the class")
    return cC, cE9, rest
