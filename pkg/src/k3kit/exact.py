"""Exact arithmetic: linear symbolic scalars and integer linear algebra.

Everything here works on Python ``int``/``Fraction`` so results are exact.
Matrices are plain lists of rows.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

ONE = "one"


class SymbolicScalar:
    """A Q-linear combination of named symbols.

    The symbol ``"one"`` stands for the rational unit.  Only addition and
    multiplication by rationals are supported; the product of two symbolic
    scalars raises ``TypeError`` so that every quantity stays linear.

    >>> mu = SymbolicScalar.symbol("mu")
    >>> (2 * mu + 3).coefficient("one")
    Fraction(3, 1)
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[str, Rational] | None = None):
        clean = {}
        for k, v in (terms or {}).items():
            v = Fraction(v)
            if v:
                clean[k] = v
        self._terms = clean

    @classmethod
    def symbol(cls, name: str) -> "SymbolicScalar":
        return cls({name: 1})

    @classmethod
    def constant(cls, value: Rational) -> "SymbolicScalar":
        return cls({ONE: value})

    @staticmethod
    def _coerce(other):
        if isinstance(other, SymbolicScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return SymbolicScalar({ONE: other})
        return NotImplemented

    @property
    def terms(self) -> dict[str, Fraction]:
        return dict(self._terms)

    def symbols(self) -> set[str]:
        return set(self._terms)

    def coefficient(self, name: str) -> Fraction:
        return self._terms.get(name, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return SymbolicScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicScalar({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SymbolicScalar({k: v * other for k, v in self._terms.items()})
        if isinstance(other, SymbolicScalar):
            raise TypeError("product of two symbolic scalars is not linear")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def substitute(self, name: str, value) -> "SymbolicScalar":
        """Replace ``name`` by another (linear) value."""
        c = self._terms.get(name)
        if c is None:
            return self
        rest = SymbolicScalar({k: v for k, v in self._terms.items() if k != name})
        return rest + c * SymbolicScalar._coerce(value)

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        total = 0j
        for k, v in self._terms.items():
            total += float(v) * (1.0 if k == ONE else complex(values[k]))
        return total

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms):
            v = self._terms[k]
            parts.append(f"{v}" if k == ONE else f"{v}*{k}")
        return " + ".join(parts)


def as_symbolic(value) -> SymbolicScalar:
    out = SymbolicScalar._coerce(value)
    if out is NotImplemented:
        raise TypeError(f"cannot interpret {value!r} as a rational symbolic scalar")
    return out


# --------------------------------------------------------------------------
# integer / rational matrices


def det_bareiss(M: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def inverse_rational(M: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def inertia(M: Sequence[Sequence]) -> tuple[int, int, int]:
    """Return ``(n_pos, n_neg, n_zero)`` of a symmetric rational matrix.

    Uses congruence transformations only (Sylvester's law of inertia), so the
    count is exact.
    """
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if A[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i -> e_i + e_j makes the (i, i) entry 2*A[i][j] != 0
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            piv = i
        d = A[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            f = A[i][piv] / d
            if f:
                for k in active:
                    A[i][k] -= f * A[piv][k]
        for i in active:
            A[i][piv] = A[piv][i] = Fraction(0)
    return pos, neg, n - pos - neg


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _integerize_rows(A: Sequence[Sequence]) -> list[list[int]]:
    rows = []
    for row in A:
        fr = [Fraction(x) for x in row]
        den = 1
        for x in fr:
            den = den * x.denominator // _gcd(den, x.denominator)
        rows.append([int(x * den) for x in fr])
    return rows


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def integer_kernel(A: Sequence[Sequence], ncols: int | None = None) -> list[list[int]]:
    """Basis of ``{v in Z^n : A v = 0}`` for a rational matrix ``A``.

    Column operations with extended gcd reduce ``A`` to column echelon form
    ``A U = [H | 0]`` with ``U`` unimodular; the trailing columns of ``U``
    are a basis of the (saturated) integer kernel.  The basis is returned in
    row Hermite normal form so it is canonical.
    """
    rows = _integerize_rows(A)
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    B = [r[:] for r in rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]  # columns of U

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a col_j + b col_k, c col_j + d col_k)
        for row in B:
            x, y = row[j], row[k]
            row[j], row[k] = a * x + b * y, c * x + d * y
        for row in U:
            x, y = row[j], row[k]
            row[j], row[k] = a * x + b * y, c * x + d * y

    r = 0
    for row in B:
        if r >= n:
            break
        for k in range(r + 1, n):
            if row[k] == 0:
                continue
            x, y = row[r], row[k]
            g, s, t = _xgcd(x, y)
            # [s t; -y/g x/g] has determinant 1
            colop(r, k, s, t, -y // g, x // g)
        if row[r] != 0:
            r += 1
    kernel = [[U[i][j] for i in range(n)] for j in range(r, n)]
    return hermite_normal_form(kernel)


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form (positive pivots, reduced above), zero rows dropped."""
    M = [list(map(int, r)) for r in rows]
    if not M:
        return []
    m, n = len(M), len(M[0])
    piv_row = 0
    for col in range(n):
        if piv_row >= m:
            break
        for i in range(piv_row + 1, m):
            if M[i][col] == 0:
                continue
            a, b = M[piv_row][col], M[i][col]
            g, s, t = _xgcd(a, b)
            u, v = -b // g, a // g
            R, S = M[piv_row], M[i]
            M[piv_row] = [s * x + t * y for x, y in zip(R, S)]
            M[i] = [u * x + v * y for x, y in zip(R, S)]
        if M[piv_row][col] == 0:
            continue
        if M[piv_row][col] < 0:
            M[piv_row] = [-x for x in M[piv_row]]
        p = M[piv_row][col]
        for i in range(piv_row):
            f = M[i][col] // p
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[piv_row])]
        piv_row += 1
    return [r for r in M if any(r)]


def solve_rational(A: Sequence[Sequence], v: Sequence) -> list[Fraction] | None:
    """Some rational solution ``x`` of ``x A = v`` (x combines the rows of A), or None."""
    m = len(A)
    if m == 0:
        return [] if not any(v) else None
    n = len(A[0])
    # transpose: A^T x = v
    M = [[Fraction(A[i][j]) for i in range(m)] + [Fraction(v[j])] for j in range(n)]
    pivots = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(n):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(M[i][m] != 0 for i in range(r, n)):
        return None
    x = [Fraction(0)] * m
    for i, c in enumerate(pivots):
        x[c] = M[i][m]
    return x


def matvec(M: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, v)), 0) for row in M]


def bilinear(u: Sequence, G: Sequence[Sequence], v: Iterable):
    """``u^T G v`` with generic (possibly symbolic) entries in ``u`` or ``v``."""
    v = list(v)
    total = 0
    for i, ui in enumerate(u):
        if not _nonzero(ui):
            continue
        row = G[i]
        acc = 0
        for j, g in enumerate(row):
            if g and _nonzero(v[j]):
                acc = acc + g * v[j]
        if _nonzero(acc):
            total = total + _mul(ui, acc)
    return total


def _nonzero(x) -> bool:
    if isinstance(x, SymbolicScalar):
        return not x.is_zero()
    return x != 0


def _mul(a, b):
    # keep symbolic x numeric ordering valid when one side is symbolic
    if isinstance(a, SymbolicScalar) and isinstance(b, SymbolicScalar):
        raise TypeError("product of two symbolic scalars is not linear")
    return a * b
