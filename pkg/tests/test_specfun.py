import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from cylfrac import specfun
from cylfrac.errors import ConvergenceError, PoleError

mpmath.mp.dps = 30

finite = dict(allow_nan=False, allow_infinity=False)
re_part = st.floats(-8, 8, **finite)
im_part = st.floats(-8, 8, **finite)


def _away_from_poles(z):
    return not (z.real <= 0.5 and abs(z.imag) < 1e-3 and abs(z.real - round(z.real)) < 1e-3)


@pytest.mark.parametrize("z", [0.5, 1.0, 3.7, 10 + 0j, 0.3 + 4j, -2.5 + 0.1j, 1e-3 + 50j, 25 - 7j])
def test_loggamma_matches_mpmath(z):
    ref = complex(mpmath.gamma(z))
    assert abs(cmath.exp(specfun.loggamma(z)) / ref - 1) < 1e-13


@given(re_part, im_part)
def test_gamma_recurrence(x, y):
    z = complex(x, y)
    if not _away_from_poles(z) or not _away_from_poles(z + 1):
        return
    lhs = specfun.loggamma(z + 1)
    rhs = specfun.loggamma(z) + cmath.log(z)
    diff = lhs - rhs
    # equal modulo 2 pi i
    assert abs(diff.real) < 1e-11
    assert abs(cmath.exp(1j * diff.imag) - 1) < 1e-11


@given(re_part, im_part)
def test_gamma_conjugation(x, y):
    z = complex(x, y)
    if not _away_from_poles(z):
        return
    assert specfun.gamma(z.conjugate()) == pytest.approx(specfun.gamma(z).conjugate(), rel=1e-13)


@given(st.floats(0.05, 6, **finite))
def test_duplication_formula(x):
    lhs = specfun.loggamma(x) + specfun.loggamma(x + 0.5)
    rhs = (1 - 2 * x) * np.log(2.0) + 0.5 * np.log(np.pi) + specfun.loggamma(2 * x)
    assert abs(lhs - rhs) < 1e-12


@pytest.mark.parametrize("z", [0, -1, -7])
def test_gamma_poles_raise(z):
    with pytest.raises(PoleError):
        specfun.gamma(z)


def test_rgamma_zero_at_poles():
    assert specfun.rgamma(-3) == 0


@pytest.mark.parametrize("z", [0.25, 2.0, 1.5 + 3j, -3.3 + 0.5j, 12 - 40j])
def test_digamma_matches_mpmath(z):
    assert abs(specfun.digamma(z) - complex(mpmath.digamma(z))) < 1e-12 * max(1, abs(z))


@given(st.floats(0.1, 5, **finite), st.floats(0.1, 5, **finite))
def test_beta_symmetric_and_decreasing(a, b):
    assert specfun.beta(a, b) == pytest.approx(specfun.beta(b, a), rel=1e-13)
    assert specfun.beta(a + 0.5, b).real < specfun.beta(a, b).real


HYP_CASES = [
    (0.5, 0.5, 1.5, 0.3),
    (1.2, -0.7, 2.3, 0.9),
    (0.75 + 2j, 0.75 - 2j, 1.8, 0.95),
    (0.3 + 1j, 0.3 - 1j, 0.9, 0.5),
    (2.0, 3.0, 4.5, 0.99),
]


@pytest.mark.parametrize("a,b,c,x", HYP_CASES)
def test_hyp2f1_matches_mpmath(a, b, c, x):
    ref = complex(mpmath.hyp2f1(a, b, c, x))
    assert abs(specfun.hyp2f1(a, b, c, x) - ref) < 1e-12 * max(1, abs(ref))


@given(st.floats(-3, 3, **finite), st.floats(-3, 3, **finite), st.floats(0.1, 4, **finite))
def test_hyp2f1_at_zero_and_symmetry(a, b, c):
    assert specfun.hyp2f1(a, b, c, 0.0) == 1
    x = 0.4
    assert specfun.hyp2f1(a, b, c, x) == pytest.approx(specfun.hyp2f1(b, a, c, x), rel=1e-12, abs=1e-14)


def test_connection_agrees_with_series():
    for a, b, c, x in HYP_CASES[:3] + HYP_CASES[4:]:
        assert specfun.hyp2f1_connection_residual(a, b, c, min(x, 0.8)) < 1e-11


def test_logarithmic_case_raises():
    with pytest.raises(ConvergenceError):
        specfun.hyp2f1(1.2, -0.7, 2.5, 0.9)
    with pytest.raises(ConvergenceError):
        specfun.hyp2f1_connection_residual(1.0, 1.0, 2.0, 0.5)


def test_conjugate_pair_matches_complex_series():
    x = np.linspace(0, 0.9, 13)
    pair = specfun.hyp2f1_conjugate_pair(0.4, 3.0, 1.7, x)
    full = np.real(specfun.hyp2f1_series(0.4 + 3j, 0.4 - 3j, 1.7, x))
    np.testing.assert_allclose(pair, full, rtol=1e-13)
    for xi, p in zip(x[::4], pair[::4]):
        assert p == pytest.approx(float(mpmath.hyp2f1(0.4 + 3j, 0.4 - 3j, 1.7, xi).real), rel=1e-13)


def test_conjugate_pair_nonconvergence_raises():
    with pytest.raises(ConvergenceError):
        specfun.hyp2f1_conjugate_pair(0.5, 1.0, 1.5, 0.999999, maxterms=50)


@given(st.lists(st.complex_numbers(max_magnitude=30, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=20))
def test_backend_parity_loggamma(zs):
    z = np.array([w for w in zs if _away_from_poles(w)], dtype=complex)
    if z.size == 0:
        return
    a, b = specfun._lgamma_loop(z), specfun._lgamma_vec(z)
    np.testing.assert_allclose(np.exp(a), np.exp(b), rtol=1e-12, atol=1e-300)


def test_backend_parity_digamma_and_pair():
    z = np.array([0.3 + 1j, 2.5, 7 - 3j, -1.5 + 0.2j])
    np.testing.assert_allclose(specfun._digamma_loop(z), specfun._digamma_vec(z), rtol=1e-13)
    x = np.linspace(0, 0.95, 9)
    np.testing.assert_allclose(specfun.hyp2f1_conjugate_pair(0.2, 5.0, 1.2, x, use_numba=True),
                               specfun.hyp2f1_conjugate_pair(0.2, 5.0, 1.2, x, use_numba=False),
                               rtol=1e-14)


def test_beta_values_and_asymptotics():
    assert specfun.beta(1, 1) == pytest.approx(1.0, rel=1e-14)
    assert specfun.beta(2, 3) == pytest.approx(1 / 12, rel=1e-14)
    g15 = specfun.gamma(1.5).real
    assert specfun.beta(100, 1.5).real == pytest.approx(g15 * 100 ** -1.5, rel=2e-2)
    errs = [abs(specfun.beta(z, 1.5).real * z ** 1.5 / g15 - 1) for z in (1e2, 2e2, 4e2, 8e2, 1.6e3, 3.2e3, 6.4e3)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_hyp2f1_log_closed_form():
    assert specfun.hyp2f1(1, 1, 2, 0.5).real == pytest.approx(2 * np.log(2), rel=1e-14)
