import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from k3kit import ampleness as A
from k3kit.ampleness import WeightParams
from k3kit.diophantine import DiophantinePair
from k3kit.errors import ConfigValidationError, OnZeroSection
from k3kit.gluing import ChartPoint, GluingConfig, Polar

P = WeightParams()


def test_regmax_examples():
    assert 0 <= A.regularized_max(0, 0, 0.1) <= 0.1
    assert A.regularized_max(1, 0, 0.1) == 1
    assert A.regularized_max(0.2, 0, 0.1) == 0.2
    with pytest.raises(ValueError):
        A.regularized_max(0, 0, 0)


def test_regmax_properties():
    rng = np.random.default_rng(0)
    eta = 0.1
    x, y = rng.uniform(-1, 1, 10_000), rng.uniform(-1, 1, 10_000)
    m = A.regularized_max(x, y, eta)
    mx = np.maximum(x, y)
    assert np.all(m >= mx) and np.all(m <= mx + eta)
    assert np.array_equal(m, A.regularized_max(y, x, eta))
    far = np.abs(x - y) >= 2 * eta
    assert np.array_equal(m[far], mx[far])
    # monotone in each argument
    d = rng.uniform(0, 0.05, 10_000)
    assert np.all(A.regularized_max(x + d, y, eta) >= m - 1e-15)
    # convexity on random segments
    x2, y2 = rng.uniform(-1, 1, 10_000), rng.uniform(-1, 1, 10_000)
    mid = A.regularized_max((x + x2) / 2, (y + y2) / 2, eta)
    assert np.all(mid <= (m + A.regularized_max(x2, y2, eta)) / 2 + 1e-15)


@settings(max_examples=300, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 1))
def test_regmax_sandwich_hypothesis(x, y, eta):
    m = A.regularized_max(x, y, eta)
    assert max(x, y) <= m <= max(x, y) + 35 / 128 * eta + 1e-12


def test_regmax_smooth_across_band():
    eta = 0.1
    u = np.linspace(-0.3, 0.3, 6001)
    m = A.regularized_max(u, 0.0, eta)
    d2 = np.diff(m, 2) / (u[1] - u[0]) ** 2
    assert np.max(np.abs(np.diff(d2))) < 0.05


def test_lambda_examples():
    s = P.abs_s
    assert A.lambda_weight(math.sqrt(s), P) == pytest.approx(0, abs=1e-20)
    assert A.lambda_weight(math.sqrt(s) * math.e, P) == pytest.approx(4)
    assert A.lambda_weight(P.R, P) == A.lambda_weight(P.R * 3, P)
    assert A.lambda_weight(P.R * 1.01, P) == A.lambda_weight(P.R * 7, P)
    with pytest.raises(ValueError):
        A.lambda_weight(0.0, P)


def test_lambda_blend_regular():
    assert A.blend_is_monotone(P)
    h = 1e-5
    for t0 in (P.R2, P.R):
        f = lambda t: float(A.lambda_weight(t, P))  # noqa: E731
        left = (f(t0) - f(t0 - h)) / h
        right = (f(t0 + h) - f(t0)) / h
        assert left == pytest.approx(right, rel=1e-3, abs=1e-3)
        l2 = (f(t0) - 2 * f(t0 - h) + f(t0 - 2 * h)) / h ** 2
        r2 = (f(t0 + 2 * h) - 2 * f(t0 + h) + f(t0)) / h ** 2
        assert l2 == pytest.approx(r2, rel=1e-2, abs=1e-2)
    t = np.linspace(P.R2, P.R, 1000)
    assert np.all(np.diff(A.lambda_weight(t, P)) >= -1e-12)


def test_psi_gluing_symmetry():
    rng = np.random.default_rng(1)
    a = math.sqrt(P.abs_s)
    r = np.exp(rng.uniform(math.log(a / P.R), math.log(a * P.R), 10_000))
    w = r * np.exp(2j * np.pi * rng.uniform(size=10_000))
    assert np.max(A.psi_gluing_defect(w, P)) < 1e-12


def test_psi_basic():
    a = math.sqrt(P.abs_s)
    assert A.psi(a, P) == pytest.approx(0, abs=1e-20)
    assert A.psi(0.3, P) == A.psi(0.3j, P) == A.psi(-0.3, P)
    with pytest.raises(OnZeroSection):
        A.psi(0, P)
    cfg = GluingConfig.build(1j, DiophantinePair.parse("sqrt(2)-1", "sqrt(3)-1"), 2, P.s)
    pt = ChartPoint.from_complex(cfg, "Wplus", 0.3, 0.01)
    other = ChartPoint.from_complex(cfg, "Wplus", 0.7 + 0.2j, 0.01j)
    assert A.psi_at(pt, P) == A.psi_at(other, P)
    assert A.psi_at(ChartPoint.from_complex(cfg, "Wplus", 0, 5.0), P) == float(A.lambda_weight(P.R, P))
    v = ChartPoint("Vfamily", (0, 0), Polar.from_complex(0.1), Polar.from_complex(0.2))
    assert A.psi_at(v, P, "-") == pytest.approx(float(A.psi(0.2, P)))


def test_psi_hessian():
    rng = np.random.default_rng(2)
    n = 1000
    r = np.exp(rng.uniform(math.log(math.sqrt(P.abs_s) / P.R), math.log(P.R2 * 0.99), n))
    w = r * np.exp(2j * np.pi * rng.uniform(size=n))
    z = rng.uniform(size=n) + 1j * rng.uniform(size=n)
    H = A.psi_hessian_check(z, w, P)
    expect = 2 / np.abs(w) ** 2
    assert np.max(np.abs(H[:, 1, 1] - expect) / expect) < 1e-5
    assert np.max(np.abs(H[:, 0, 0])) < 1e-5 * np.max(expect)
    assert np.max(np.abs(H[:, 0, 1]) / expect) < 1e-5
    a = math.sqrt(P.abs_s)
    h0 = A.psi_hessian_check(np.array([0j]), np.array([a + 0j]), P)[0]
    assert h0[1, 1].real == pytest.approx(2 / P.abs_s, rel=1e-5)


def test_model_kahler_form():
    w = np.array([0.001, 0.01j, 0.002 + 0.002j])
    K = A.model_kahler_form(w, P)
    eig = np.linalg.eigvalsh(K)
    assert np.all(eig > 0)
    assert np.allclose(np.linalg.det(K).real, 2 * P.c * P.b_over / np.abs(w) ** 2)
    # additive composition with c times the psi Hessian
    H = A.psi_hessian_check(np.zeros(3), w, P)
    comp = P.c * H
    comp[:, 0, 0] += P.b_over
    assert np.allclose(comp, K, rtol=1e-5)
    r = np.geomspace(1e-4, 1e-1, 50)
    dets = np.linalg.det(A.model_kahler_form(r, P)).real
    assert np.all(np.diff(dets) < 0)
    with pytest.raises(OnZeroSection):
        A.model_kahler_form(0, P)


def test_branches():
    z = 0.3 + 0.4j
    assert A.glued_weight(z, 1e-6, P)[1] == "C"
    assert A.glued_weight(z, math.sqrt(P.eps0) * P.R * 0.999, P)[1] == "C"
    assert A.glued_weight(z, P.R * 0.99, P)[1] == "L"
    assert A.glued_weight(z, P.R1 * 1.0001, P)[1] == "L"
    rng = np.random.default_rng(3)
    zz = rng.uniform(size=2000) + 1j * rng.uniform(size=2000)
    r = np.exp(rng.uniform(math.log(P.R1 * 1.0001), math.log(P.R), 2000))
    assert set(A.glued_weight(zz, r, P)[1]) == {"L"}
    r = np.exp(rng.uniform(math.log(1e-6), math.log(math.sqrt(P.eps0) * P.R * 0.9999), 2000))
    assert set(A.glued_weight(zz, r, P)[1]) == {"C"}


def test_glued_weight_psh():
    rng = np.random.default_rng(4)
    z, w = A.sample_annulus(P, 3000, rng)
    H = A.weight_hessians(z, w, P, with_psi=False)
    eig = np.linalg.eigvalsh(A._scaled(H, w))
    scale = np.max(np.abs(eig))
    assert eig.min() >= -1e-6 * scale


def test_audit_positive_default():
    rep = A.audit(P, 10_000)
    assert rep.positive and rep.min_eigenvalue > 0
    assert set(rep.branch_counts) == {"L", "C", "blend"} and sum(rep.branch_counts.values()) == 10_000
    assert rep.richardson_gap < 1e-3
    assert "blend_zone" in rep.by_region and rep.to_json()["positive"]


def test_audit_c_window():
    assert not A.audit(P, 2000, c=1.0).positive
    assert A.audit(P, 2000, c=1e-4).positive
    c = A.line_search_c(P, 2000)
    assert A.audit(P, 2000, c=c).positive and c < 1
    assert c == 2.0 ** -math.ceil(-math.log2(c))


def test_audit_user_weight():
    # a user-supplied psh weight
    model = lambda z, w: 2 * math.pi * np.imag(z) ** 2 + np.log(np.abs(w) ** 2) + 0.05 * np.abs(w) ** 2  # noqa: E731
    rep = A.audit(P, 3000, phiL_model=model)
    assert rep.positive


def test_params_validation():
    assert P.violations() == []
    assert P.validate() is P
    assert replace(P, s=2.0).violations()
    assert any(k == "s" for k, _ in replace(P, s=0.5).violations())
    assert replace(P, R1=1.9, R2=1.7).violations()
    assert replace(P, eps=-1).violations()
    assert replace(P, eps=2.0).violations()
    with pytest.raises(ConfigValidationError):
        replace(P, R=1.5).validate()
    assert abs(P.s) < P.eps0 and math.sqrt(P.eps0) * P.R < P.R1
