import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from cylfrac import symbol
from cylfrac.errors import DomainError, PoleError
from cylfrac.symbol import CylinderParams

mpmath.mp.dps = 30
finite = dict(allow_nan=False, allow_infinity=False)


def theta_mp(n, g, k, xi):
    return float(_theta_mp(n, g, k, xi))


def _theta_mp(n, g, k, xi):
    nu = mpmath.sqrt((mpmath.mpf(n) / 2 - 1) ** 2 + k * (k + n - 2))
    up = mpmath.gamma(0.5 + g / 2 + nu / 2 + 0.5j * xi)
    down = mpmath.gamma(0.5 - g / 2 + nu / 2 + 0.5j * xi)
    return 2 ** (2 * g) * abs(up) ** 2 / abs(down) ** 2


@pytest.mark.parametrize("n,g,k,xi", [(3, 0.5, 0, 0.0), (3, 0.5, 0, 7.0), (4, 0.3, 2, 1.5),
                                      (7, 2.6, 1, 3.0), (2, 0.8, 0, 20.0), (5, 0.999, 3, 0.2)])
def test_theta_matches_mpmath(n, g, k, xi):
    assert symbol.theta(CylinderParams(n, g, k), xi) == pytest.approx(theta_mp(n, g, k, xi), rel=1e-12)


@given(st.integers(2, 12), st.floats(0.01, 0.99, **finite), st.integers(0, 4),
       st.floats(0, 50, **finite))
def test_theta_even_positive(n, g, k, xi):
    p = CylinderParams(n, g, k)
    a, b = symbol.theta(p, xi), symbol.theta(p, -xi)
    assert a == b and a > 0


@given(st.integers(3, 10), st.floats(0.05, 0.95, **finite), st.floats(0, 30, **finite))
def test_theta_increasing_in_k_and_xi(n, g, xi):
    vals = [symbol.theta(CylinderParams(n, g, k), xi) for k in range(4)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    p = CylinderParams(n, g)
    assert symbol.theta(p, xi + 0.5) > symbol.theta(p, xi)


def test_theta_large_xi_growth():
    # |xi|^{2 gamma} growth
    p = CylinderParams(4, 0.4)
    assert symbol.theta(p, 1e6) / 1e6 ** 0.8 == pytest.approx(1.0, rel=1e-6)


def test_theta_at_zero_is_curvature():
    for n in (2, 3, 6):
        for g in (0.1, 0.5, 0.9):
            assert symbol.theta(CylinderParams(n, g), 0.0) == pytest.approx(symbol.yamabe_constant(n, g), rel=1e-13)


def test_theta_integer_laplacian():
    xi = np.linspace(0, 5, 11)
    for n in (3, 5):
        for k in (0, 2):
            expected = xi ** 2 + (n - 2) ** 2 / 4 + k * (k + n - 2)
            np.testing.assert_allclose(symbol.theta_integer(n, 1, k, xi), expected, rtol=1e-14)


def test_theta_integer_paneitz_value():
    assert symbol.theta_integer(6, 2, 0, 0.0) == pytest.approx(9.0, rel=1e-14)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_theta_continuous_at_even_order(k):
    xi = np.linspace(0, 6, 7)
    exact = symbol.theta_integer(6, 2, k, xi)
    for g in (2 - 1e-7, 2 + 1e-7):
        approx = symbol.theta(CylinderParams(6, g, k), xi)
        np.testing.assert_allclose(approx, exact, rtol=1e-5)


def test_theta_tends_to_paneitz_value():
    gaps = []
    for h in (3, 4, 5, 6):
        for g in (2 - 10.0 ** -h, 2 + 10.0 ** -h):
            gaps.append(abs(symbol.theta(CylinderParams(6, g), 0.0) - 9.0))
    assert all(b < a for a, b in zip(gaps[::2], gaps[2::2]))
    assert max(gaps[-2:]) < 1e-4


def test_theta_derivative_in_gamma_finite_difference():
    n, k, xi, g = 4, 1, 2.0, 0.6
    p = lambda gg: symbol.theta(CylinderParams(n, gg, k), xi)
    h = 1e-5
    fd = (p(g + h) - p(g - h)) / (2 * h)
    ref = float(mpmath.diff(lambda gg: _theta_mp(n, gg, k, xi), g))
    assert fd == pytest.approx(ref, rel=1e-6)


def test_integer_guard():
    with pytest.raises(DomainError):
        symbol.theta(CylinderParams(4, 1.0), 1.0)
    assert not symbol.near_positive_integer(1e-9)
    assert symbol.near_positive_integer(1 + 5e-9)


@pytest.mark.parametrize("bad", [dict(n=1, gamma=0.5), dict(n=3, gamma=0.0), dict(n=3, gamma=1.5),
                                 dict(n=3, gamma=0.5, k=-1), dict(n=3.5, gamma=0.5)])
def test_params_validation(bad):
    with pytest.raises(DomainError):
        CylinderParams(**bad)


def test_constants_classical_values():
    c = symbol.scattering_constants(3, 0.5)
    assert c.c_ngamma == pytest.approx(2 / math.pi, rel=1e-14)
    assert c.d_gamma == pytest.approx(-1.0, rel=1e-14)
    assert c.dtilde_gamma == pytest.approx(1.0, rel=1e-14)
    assert c.Q_sphere == pytest.approx(1.0, rel=1e-14)
    for n in (3, 4, 7):
        assert symbol.sphere_curvature(n, 1 - 1e-12) == pytest.approx(n * (n - 2) / 4, rel=1e-10)
        assert symbol.yamabe_constant(n, 1 - 1e-9) == pytest.approx((n - 2) ** 2 / 4, rel=1e-7)


@given(st.floats(0.01, 0.99, **finite))
def test_constant_relations(g):
    d, dt = symbol.d_gamma(g), symbol.dtilde_gamma(g)
    assert d == pytest.approx(-2 * g * dt, rel=1e-13)
    assert dt > 0 and d < 0
    ref = float(2 ** (2 * g) * mpmath.gamma(g) / mpmath.gamma(-g))
    assert d == pytest.approx(ref, rel=1e-12)


def test_kappa_matches_mpmath():
    n, g = 3, 0.4
    ref = float(mpmath.pi ** (-1.5) * 2 ** 0.8 * 0.4 * mpmath.gamma(1.9) / mpmath.gamma(0.6))
    assert symbol.kappa_constant(n, g) == pytest.approx(ref, rel=1e-13)


def test_constants_small_gamma_and_pole():
    c = symbol.scattering_constants(3, 1e-9)
    assert c.c_ngamma == pytest.approx(1.0, abs=1e-8)
    assert math.isnan(symbol.scattering_constants(5, 1.5).dtilde_gamma)
    with pytest.raises(PoleError):
        symbol.scattering_constants(5, 1.0)


def test_apply_multiplier():
    p = CylinderParams(3, 0.5)
    xi = np.array([0.0, 1.0, 2.0])
    vhat = np.array([1.0, 1j, -2.0])
    np.testing.assert_allclose(symbol.apply_multiplier(vhat, xi, p), vhat * symbol.theta(p, xi))
    with pytest.raises(ValueError):
        symbol.apply_multiplier(vhat, xi[:2], p)
