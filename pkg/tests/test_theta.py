import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from k3kit import theta
from k3kit.errors import CNotRemoved, NotIntegral
from k3kit.numerics import complex_hessian
from k3kit.theta import HermitianData, SemiCharacter, ToroidalLattice


@pytest.fixture(scope="module")
def lat(dioph_pair):
    return ToroidalLattice(1j, dioph_pair)


def rand_c2(rng):
    return rng.normal(size=2) + 1j * rng.normal(size=2)


def test_pairing_examples(lat):
    assert theta.hermitian_pairing(HermitianData(1, 0, 0), [1, 0], [1, 0]) == 1
    assert theta.hermitian_pairing(HermitianData(0, 1j, 0), [1, lat.p], [0, 1]) == pytest.approx(1j)


def test_pairing_hermitian_symmetry():
    rng = np.random.default_rng(0)
    for _ in range(100):
        Hd = HermitianData(rng.normal(), complex(*rng.normal(size=2)), rng.normal())
        x, y = rand_c2(rng), rand_c2(rng)
        assert theta.hermitian_pairing(Hd, x, y) == pytest.approx(theta.hermitian_pairing(Hd, y, x).conjugate())


def test_integrality_examples(lat):
    rep = theta.integrality_check(HermitianData(1, 0), lat)
    assert rep.ok and rep.values == pytest.approx((0, 0, 1))
    rep = theta.integrality_check(HermitianData(0, 2 + 3j), lat)
    assert rep.values[:2] == pytest.approx((3, 2))
    assert not rep.ok
    assert theta.integrality_values_closed(HermitianData(0, 2 + 3j), lat) == pytest.approx(rep.values)


def test_semicharacter_examples(lat):
    rho = SemiCharacter.from_phases(0.1, 0.2, 0.3)
    Hd = theta.admissible_hermitian(lat, 1, -2, 3)
    assert theta.semicharacter_extend(rho, Hd, lat, (0, 0, 0)) == 1
    assert theta.semicharacter_extend(rho, Hd, lat, (1, 0, 0)) == pytest.approx(rho.rho1)
    with pytest.raises(NotIntegral):
        theta.semicharacter_extend(rho, HermitianData(0, 2 + 3j), lat, (1, 1, 0))


def test_semicharacter_rule_and_order(lat):
    rng = np.random.default_rng(1)
    E = theta._imH_table  # Im H table on the generators
    for _ in range(200):
        Hd = theta.random_admissible(lat, rng, 3)
        rho = SemiCharacter.from_phases(*rng.uniform(0, 1, 3))
        k = rng.integers(-4, 5, 3)
        kk = rng.integers(-4, 5, 3)
        T = E(Hd, lat)
        imH = float(k @ T @ kk)  # Im H(lambda_k, lambda_kk)
        lhs = theta.semicharacter_extend(rho, Hd, lat, k + kk)
        rhs = (theta.semicharacter_extend(rho, Hd, lat, k) * theta.semicharacter_extend(rho, Hd, lat, kk)
               * cmath.exp(1j * math.pi * imH))
        assert abs(lhs - rhs) < 1e-9
        orders = [theta.semicharacter_extend(rho, Hd, lat, k, order=o) for o in [(0, 1, 2), (2, 1, 0), (1, 2, 0)]]
        assert max(abs(o - orders[0]) for o in orders) < 1e-9


def test_cocycle_identity_and_negative_control(lat):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(500):
        Hd = theta.random_admissible(lat, rng, 4)
        rho = SemiCharacter.from_phases(*rng.uniform(0, 1, 3))
        lam, mu = rng.integers(-3, 4, 3), rng.integers(-3, 4, 3)
        worst = max(worst, theta.cocycle_defect(Hd, rho, lat, lam, mu, rand_c2(rng)))
    assert worst < 1e-9
    bad = HermitianData(0.7, 0.3 + 0.45j)
    defects = [theta.cocycle_defect(bad, SemiCharacter(), lat, rng.integers(-3, 4, 3), rng.integers(-3, 4, 3),
                                    rand_c2(rng), strict=False) for _ in range(50)]
    assert max(defects) > 1e-3
    with pytest.raises(NotIntegral):
        theta.cocycle_eval(bad, SemiCharacter(), lat, (1, 0, 0), (0, 0))


def test_cocycle_trivial_lambda(lat):
    Hd = theta.admissible_hermitian(lat, 0, 1, 2)
    assert theta.cocycle_eval(Hd, SemiCharacter.from_phases(.3, .1, .7), lat, (0, 0, 0), (0.3 + 1j, 2)) == pytest.approx(1)


def test_gauge(lat):
    rng = np.random.default_rng(3)
    for _ in range(50):
        H0 = theta.random_admissible(lat, rng, 3)
        Hd = HermitianData(H0.a, H0.b, 1.0)
        assert theta.gauge_defect(Hd, SemiCharacter(), lat, rng.integers(-3, 4, 3), rand_c2(rng)) < 1e-9
    Hc0 = HermitianData(1.0, 0.5j, 0.0)
    assert theta.gauge_remove_c(Hc0)[0] == Hc0
    Hc = HermitianData(1.0, 0.5j, 2.0)
    assert theta.intersection_numbers(theta.gauge_remove_c(Hc)[0], lat) == theta.intersection_numbers(Hc0, lat)
    with pytest.raises(CNotRemoved):
        theta.intersection_numbers(Hc, lat)


def test_metric(lat):
    assert theta.metric_norm(HermitianData(1, 0), (0, 0), 2.0) == pytest.approx(4.0)
    assert theta.metric_norm(HermitianData(1, 0, 0), (1, 0), 1.0) == pytest.approx(math.exp(-math.pi))
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(500):
        Hd = theta.random_admissible(lat, rng, 3)
        rho = SemiCharacter.from_phases(*rng.uniform(0, 1, 3))
        zeta = complex(*rng.normal(size=2))
        worst = max(worst, theta.metric_defect(Hd, rho, lat, rng.integers(-2, 3, 3), rand_c2(rng), zeta))
    assert worst < 1e-9


def test_curvature_matches_finite_differences():
    rng = np.random.default_rng(5)
    for _ in range(100):
        Hd = HermitianData(rng.normal(), complex(*rng.normal(size=2)), 0.0)
        x = rand_c2(rng)
        # -log h = pi H(x, x); its complex Hessian is Theta's coefficient matrix
        f = lambda v: math.pi * theta.hermitian_pairing(Hd, v, v).real  # noqa: E731
        M = complex_hessian(f, x, [1e-3, 1e-3])
        th = theta.curvature_form(Hd)
        assert M[0, 0] == pytest.approx(th["dz^dzbar"], abs=1e-6)
        assert M[0, 1] == pytest.approx(th["dz^detabar"], abs=1e-6)
        assert M[1, 0] == pytest.approx(th["deta^dzbar"], abs=1e-6)
        assert abs(M[1, 1]) < 1e-6
    assert set(theta.curvature_form(HermitianData(2.0, 0)).values()) == {2 * math.pi, 0}
    with pytest.raises(CNotRemoved):
        theta.curvature_form(HermitianData(1, 0, 1))


def test_intersection_examples(lat):
    assert theta.intersection_numbers(HermitianData(1, 0), lat) == pytest.approx((1, 0, 0))
    p, q = lat.p, lat.q
    assert theta.intersection_numbers(HermitianData(0, 2 + 3j), lat) == pytest.approx((2 * p - 3 * q, -2, -3))
    assert theta.integrate_chern_cycle(HermitianData(1, 0), lat, "ab") == pytest.approx(1, abs=1e-9)
    assert theta.integrate_chern_cycle(HermitianData(1.3, 0), lat, "bg") == pytest.approx(0, abs=1e-9)
    with pytest.raises(ValueError):
        theta.integrate_chern_cycle(HermitianData(1, 0), lat, "ab", grid=8)


def test_integration_independent_of_modulus_and_grid(lat):
    Hd = theta.admissible_hermitian(lat, 2, -1, 3)
    vals = [theta.integrate_chern_cycle(Hd, lat, "ga", w0, g) for w0 in (0.5, 1.0, 3.0) for g in (16, 20, 32)]
    assert max(vals) - min(vals) < 1e-8


def test_three_way_agreement(lat):
    rng = np.random.default_rng(6)
    for _ in range(30):
        Hd = theta.random_admissible(lat, rng, 4)
        iab, ibg, iga = theta.intersection_numbers(Hd, lat)
        m21, m31, m32 = theta.integrality_check(Hd, lat).values
        # dictionary: I_ga = -m21, I_bg = -m31, I_ab = m32 - p m31 + q m21 ... all integers here
        assert iga == pytest.approx(-m21, abs=1e-9)
        assert ibg == pytest.approx(-m31, abs=1e-9)
        for v in (iab, ibg, iga):
            assert abs(v - round(v)) < 1e-9


def test_extendability(lat):
    assert theta.is_extendable(HermitianData(1, 0), lat)
    assert not theta.is_extendable(HermitianData(0, 2 + 3j), lat)
    rng = np.random.default_rng(7)
    for _ in range(100):
        Hd = HermitianData(rng.normal(), complex(*rng.integers(-1, 2, 2)) * rng.uniform(0.5, 1))
        ext = theta.is_extendable(Hd, lat)  # asserts equivalence internally
        _, ibg, iga = theta.intersection_numbers(Hd, lat)
        assert ext == (abs(ibg) < 1e-9 and abs(iga) < 1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5),
       st.floats(-0.49, 0.49), st.floats(0.3, 3.0))
def test_admissible_hermitian_hits_targets(n1, n2, n3, tr, ti):
    from k3kit.diophantine import DiophantinePair

    lat = ToroidalLattice(complex(tr, ti), DiophantinePair.parse("sqrt(2)-1", "sqrt(3)-1", precision=64))
    rep = theta.integrality_check(theta.admissible_hermitian(lat, n1, n2, n3), lat)
    assert rep.ok
    assert rep.values == pytest.approx((n1, n2, n3), abs=1e-9)
