from fractions import Fraction

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form
from hypothesis import given, settings, strategies as st

from k3kit.exact import (SymbolicScalar, bilinear, det_bareiss, hermite_normal_form, inertia,
                         integer_kernel, inverse_rational, solve_rational)

small = st.integers(-6, 6)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def test_symbolic_linear_ops():
    mu, tau = SymbolicScalar.symbol("mu"), SymbolicScalar.symbol("tau")
    e = 2 * mu - tau / 3 + 1
    assert e.coefficient("mu") == 2
    assert e.coefficient("tau") == Fraction(-1, 3)
    assert e.coefficient("one") == 1
    assert (e - e).is_zero()
    with pytest.raises(TypeError):
        mu * tau


def test_symbolic_substitute_and_evaluate():
    mu, x = SymbolicScalar.symbol("mu"), SymbolicScalar.symbol("x")
    e = (3 * mu + x).substitute("x", 2 * mu - 1)
    assert e == 5 * mu - 1
    assert e.evaluate({"mu": 1j}) == pytest.approx(-1 + 5j)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: matrices(n, n)))
def test_det_matches_sympy(M):
    assert det_bareiss(M) == sympy.Matrix(M).det()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: matrices(n, n)))
def test_inverse_rational(M):
    if det_bareiss(M) == 0:
        return
    inv = inverse_rational(M)
    n = len(M)
    prod = [[sum(Fraction(M[i][k]) * inv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert prod == [[int(i == j) for j in range(n)] for i in range(n)]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: matrices(n, n)))
def test_inertia_matches_eigenvalues(M):
    S = [[M[i][j] + M[j][i] for j in range(len(M))] for i in range(len(M))]
    ev = np.linalg.eigvalsh(np.array(S, dtype=float))
    pos, neg, zero = inertia(S)
    assert (pos, neg) == (int(np.sum(ev > 1e-9)), int(np.sum(ev < -1e-9)))
    assert pos + neg + zero == len(S)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda r: st.integers(r, 7).flatmap(lambda c: matrices(r, c))))
def test_integer_kernel_against_sympy(A):
    n = len(A[0])
    K = integer_kernel(A, n)
    # every vector is in the kernel
    for v in K:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in A)
    # rank matches the rational nullspace
    assert len(K) == len(sympy.Matrix(A).nullspace())
    # saturation: the Smith invariants of the basis are all 1
    if K:
        snf = smith_normal_form(sympy.Matrix(K), domain=sympy.ZZ)
        diag = [abs(snf[i, i]) for i in range(len(K))]
        assert all(d == 1 for d in diag)


def test_hnf_canonical():
    rows = [[2, 4, 6], [1, 2, 4]]
    H = hermite_normal_form(rows)
    assert H == hermite_normal_form([[1, 2, 4], [3, 6, 10]])
    assert H[0][0] > 0


def test_solve_rational_and_bilinear():
    A = [[1, 0, 1], [0, 2, 0]]
    x = solve_rational(A, [3, 4, 3])
    assert x == [3, 2]
    assert solve_rational(A, [1, 0, 0]) is None
    mu = SymbolicScalar.symbol("mu")
    assert bilinear([mu, 1], [[0, 1], [1, -2]], [1, 0]) == 1
    assert bilinear([mu, 0], [[0, 1], [1, -2]], [0, 3]) == 3 * mu
