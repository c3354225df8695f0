
import mpmath
import numpy as np
import pytest

from cylfrac import extension as ex, geometry, quadrature, symbol
from cylfrac.errors import DomainError
from cylfrac.symbol import CylinderParams


def test_mode_ode_matches_closed_form():
    p = CylinderParams(4, 0.35, 1)
    prof = ex.solve_mode_ode(p, 1.5)
    np.testing.assert_allclose(prof.phi, ex.mode_closed_form(p, 1.5, prof.z), rtol=1e-9)
    A1, A2 = ex.mode_boundary_coefficients(p, 1.5)
    assert prof.A1 == pytest.approx(A1, rel=1e-9)
    assert prof.A2 == pytest.approx(A2, rel=1e-8)
    assert prof.symbol == pytest.approx(symbol.theta(p, 1.5), rel=1e-8)


def test_boundary_coefficients_reproduce_symbol():
    for n, g, k, xi in [(3, 0.2, 0, 0.0), (5, 0.8, 2, 4.0), (6, 0.5, 1, 11.0)]:
        p = CylinderParams(n, g, k)
        A1, A2 = ex.mode_boundary_coefficients(p, xi)
        assert symbol.d_gamma(g) * A2 / A1 == pytest.approx(symbol.theta(p, xi), rel=1e-12)


@pytest.mark.parametrize("xi", [0.0, 0.7, 9.0, 45.0])
def test_radial_mode_matches_mpmath(xi):
    n, g = 3, 0.4
    rho = np.array([1e-3, 0.05, 0.6, 1.4, 1.95])
    V, _ = ex.radial_mode(n, g, [xi], rho)
    mpmath.mp.dps = 40
    h = n / 4 - g / 2
    alpha = mpmath.gamma(n / 2) * mpmath.gamma(g) / abs(mpmath.gamma(h + g + 0.5j * xi)) ** 2
    for r, v in zip(rho, V[0]):
        z2 = ((4 - r * r) / (4 + r * r)) ** 2
        ref = (4 / (4 + r * r)) ** (n / 2 - g) * mpmath.hyp2f1(h + 0.5j * xi, h - 0.5j * xi, n / 2, z2) / alpha
        assert v == pytest.approx(float(mpmath.re(ref)), rel=1e-11, abs=1e-13)


def test_radial_mode_derivative_finite_difference():
    rho = np.array([0.02, 0.3, 1.0, 1.7])
    h = 1e-6
    V, dV = ex.radial_mode(4, 0.6, [0.0, 3.0], rho)
    Vp, _ = ex.radial_mode(4, 0.6, [0.0, 3.0], rho + h)
    Vm, _ = ex.radial_mode(4, 0.6, [0.0, 3.0], rho - h)
    np.testing.assert_allclose(dV, (Vp - Vm) / (2 * h), rtol=1e-6, atol=1e-9)


def test_constant_trace_extends_to_base_profile():
    f = ex.extension_field(np.ones(32), 12.0, 3, 0.4)
    V0, _ = f.base_profile()
    V = f.values()
    np.testing.assert_allclose(V, np.broadcast_to(V0[:, None], V.shape), rtol=1e-14)
    near, _ = ex.radial_mode(3, 0.4, [0.0], np.array([1e-9]))
    assert near[0, 0] == pytest.approx(1.0, abs=1e-6)


def test_constant_trace_hamiltonians_are_static():
    f = ex.extension_field(np.ones(16), 8.0, 4, 0.3)
    h = [ex.hamiltonian(f, t).H for t in (0.0, 1.0, 3.0)]
    hs = [ex.hamiltonian_star(f, t).H for t in (0.0, 1.0, 3.0)]
    assert np.ptp(h) == 0 and np.ptp(hs) == 0
    # at V* = 1 the rho* integrals vanish and only the boundary term is left
    c = symbol.yamabe_constant(4, 0.3) / symbol.dtilde_gamma(0.3)
    assert hs[0] == pytest.approx(c * ((4 - 0.6) / 8 - 0.5), rel=1e-12)


def test_literal_unit_field_in_rho_chart():
    # V = 1 everywhere (not the extension of v = 1) has no derivative terms
    rule = quadrature.composite()
    rho = rule.nodes
    one, zero = np.ones_like(rho), np.zeros_like(rho)
    hv = ex.hamiltonian_from_samples(rule, rho, 3, 0.5, one, zero, zero, 1.0)
    assert hv.kinetic_t == 0 and hv.kinetic_rho == 0
    assert hv.H == pytest.approx(hv.potential + hv.boundary)


def test_extension_is_linear():
    t = ex.periodic_grid(10.0, 64)
    a = np.cos(2 * np.pi * t / 10)
    b = 0.3 * np.sin(6 * np.pi * t / 10) + 0.1
    fa, fb = ex.extension_field(a, 10.0, 3, 0.5), ex.extension_field(b, 10.0, 3, 0.5)
    fab = ex.extension_field(2 * a - b, 10.0, 3, 0.5)
    rho = np.array([0.1, 0.9, 1.8])
    np.testing.assert_allclose(fab.values(rho), 2 * fa.values(rho) - fb.values(rho), atol=1e-13)
    np.testing.assert_allclose(fa.trace_at(t), a, atol=1e-13)


def test_neumann_trace_of_single_mode_is_symbol():
    p = CylinderParams(3, 0.4)
    f = ex.mode_field(1.3, 0.2, 3, 0.4)
    t = np.array([0.0, 0.5, 2.0])
    np.testing.assert_allclose(ex.neumann_trace(f, t), f.trace_at(t) * symbol.theta(p, 1.3), rtol=1e-6)


def test_quadratic_parts_scale_with_amplitude_squared():
    small, big = ex.mode_field(1.3, 1e-2, 3, 0.4), ex.mode_field(1.3, 2e-2, 3, 0.4)
    assert ex.second_variation(big, 0.3) == pytest.approx(4 * ex.second_variation(small, 0.3), rel=1e-12)
    hs, hb = ex.hamiltonian(small, 0.3), ex.hamiltonian(big, 0.3)
    for part in ("kinetic_t", "kinetic_rho", "potential"):
        assert getattr(hb, part) == pytest.approx(4 * getattr(hs, part), rel=1e-12)
    p = 2 * 3 / (3 - 0.8)
    assert hb.boundary == pytest.approx(2 ** p * hs.boundary, rel=1e-12)


def test_bubble_hamiltonian_conserved():
    n, g, L = 3, 0.5, 40.0
    t = ex.periodic_grid(L, 256)
    f = ex.extension_field(geometry.bubble_profile(t, n, g), L, n, g)
    vals = [ex.hamiltonian(f, s) for s in (0.0, 1.0, 3.0)]
    spread = np.ptp([v.H for v in vals]) / max(v.scale for v in vals)
    assert spread < 1e-9


def test_printed_star_weights_are_not_conserved():
    n, g, L = 3, 0.5, 40.0
    t = ex.periodic_grid(L, 256)
    f = ex.extension_field(geometry.bubble_profile(t, n, g), L, n, g)
    exact = [ex.hamiltonian_star(f, s).H for s in (0.0, 2.0)]
    printed = [ex.hamiltonian_star(f, s, weights="printed").H for s in (0.0, 2.0)]
    assert abs(exact[1] - exact[0]) < 1e-9
    # drifts by about 2% while the exact weights stay at roundoff
    assert abs(printed[1] - printed[0]) > 1e-2 * abs(printed[0])


def test_band_limit_and_validation():
    t = ex.periodic_grid(10.0, 512)
    with pytest.raises(DomainError):
        ex.extension_field(np.sign(t), 10.0, 3, 0.4)
    with pytest.raises(DomainError):
        ex.extension_field(np.ones(8), 10.0, 3, 1.2)
    with pytest.raises(ValueError):
        ex.extension_field(np.ones(1), 10.0, 3, 0.4)


def test_quadrature_integrates_weight_exactly():
    rule = quadrature.composite()
    for g in (0.02, 0.3, 0.5, 0.7, 0.98):
        a = 1 - 2 * g
        assert rule.integrate(rule.nodes ** a) == pytest.approx(2 ** (a + 1) / (a + 1), rel=1e-12)
    gj = quadrature.gauss_jacobi(0.1, 0.4, 20)
    assert gj.integrate(np.ones(20)) == pytest.approx(0.1 ** 1.4 / 1.4, rel=1e-13)


def test_unit_trace_satisfies_boundary_condition():
    f = ex.extension_field(np.ones(8), 10.0, 3, 0.4)
    np.testing.assert_allclose(ex.neumann_trace(f, [0.0, 1.0]), symbol.yamabe_constant(3, 0.4), rtol=1e-5)


def test_zero_mode_coefficient_is_alpha():
    A1, _ = ex.mode_boundary_coefficients(CylinderParams(5, 0.3), 0.0)
    assert A1 == pytest.approx(geometry.zero_mode_alpha(5, 0.3), rel=1e-13)


def test_second_variation_zero_field_and_zero_mode():
    assert ex.second_variation(ex.mode_field(1.0, 0.0, 3, 0.5), 0.3) == 0.0
    # constant perturbation: derivative terms vanish, the boundary term is positive
    for n, g in [(3, 0.5), (4, 0.3), (4, 0.7)]:
        f = ex.extension_field(np.full(8, 1e-2), 10.0, n, g)
        c = symbol.yamabe_constant(n, g) / symbol.dtilde_gamma(g)
        assert ex.second_variation(f, 0.0) == pytest.approx(c * 4 * g / (n - 2 * g) * 1e-4, rel=1e-12)


def test_even_trace_gives_even_field():
    L = 12.0
    t = ex.periodic_grid(L, 64)
    f = ex.extension_field(np.cos(2 * np.pi * t / L) ** 2 + 0.5, L, 4, 0.6)
    rho = np.array([0.05, 0.7, 1.6])
    s = np.array([0.3, 1.1, 2.9])
    np.testing.assert_allclose(f.evaluate(s, rho)[0], f.evaluate(-s, rho)[0], atol=1e-14)


@pytest.mark.parametrize("g", [0.05, 0.15])
def test_small_order_hamiltonian_finite_and_conserved(g):
    # rho-derivatives blow up like rho^{2g-1} at the smallest nodes
    t = ex.periodic_grid(40.0, 512)
    f = ex.extension_field(geometry.bubble_profile(t, 3, g), 40.0, 3, g)
    for fn in (ex.hamiltonian, ex.hamiltonian_star):
        vals = [fn(f, s) for s in (0.0, 1.0, 4.0)]
        assert all(np.isfinite(v.H) for v in vals)
        assert np.ptp([v.H for v in vals]) < 1e-10 * max(v.scale for v in vals)
