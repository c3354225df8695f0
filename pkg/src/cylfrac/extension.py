"""Extension fields, mode-by-mode scattering solves and conserved quantities.

For each frequency xi the radial (k = 0) extension of e^{i xi t} is the
profile V_xi(rho) e^{i xi t}, normalised so that V_xi -> 1 as rho -> 0.  In the
variable z = (4 - rho^2)/(4 + rho^2) the scattering ODE has the closed-form
regular solution

    phi(z) = z^e (1 - z^2)^{n/4 - gamma/2} 2F1(a, conj a; 1 + nu; z^2),
    e = 1 - n/2 + nu,  a = (1 + nu - gamma)/2 + i xi/2,

and the numerical ODE solve in ``solve_mode_ode`` is an independent check of
both this profile and the symbol theta read off from its boundary expansion.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import solve_ivp

from . import quadrature, specfun
from .errors import ConvergenceError, DomainError, IntegrationError
from .geometry import metric_coeffs
from .symbol import (CylinderParams, d_gamma, dtilde_gamma, hamiltonian_constant, theta,
                     yamabe_constant)

U_SWITCH = 0.1
# Near rho = 0 the connected form loses about exp(2 xi sqrt(u)) to cancellation,
# so the switch point moves towards the boundary as xi grows: xi sqrt(u) <= 8.
SWITCH_XI_SQRT_U = 8.0
XI_MAX = 60.0
BAND_TOL = 1e-9
RICHARDSON_RHO = (1e-2, 5e-3, 2.5e-3)
ODE_Z0 = 1e-4
ODE_Z1 = 1.0 - 1e-4
FIT_WINDOW = (1.0 - 1e-2, 1.0 - 1e-4)
FIT_POINTS = 200
FROBENIUS_TERMS = 12
MODE_CUTOFF = 1e-15


def _check_fractional(gamma):
    if not 0.0 < gamma < 1.0:
        raise DomainError("extension problems need gamma in (0, 1)")


# ------------------------------------------------------------ closed-form modes


def _log_alpha0(n, gamma, xi):
    """log of the leading boundary coefficient of the k = 0 profile."""
    lg = specfun.loggamma
    return (lg(n / 2).real + lg(gamma).real
            - specfun.log_abs_gamma_sq(n / 4 + gamma / 2 + 0.5j * xi))


def radial_mode(n, gamma, xi, rho):
    """(V, dV/drho) of the k = 0 extension of e^{i xi t}, shape (len(xi), len(rho)).

    Near rho = 0 the connected form in u = 1 - z^2 is used (it makes V(0) = 1
    explicit); elsewhere the direct series in x = z^2.
    """
    _check_fractional(gamma)
    xi = np.abs(np.atleast_1d(np.asarray(xi, dtype=float)))[:, None]
    rho = np.atleast_1d(np.asarray(rho, dtype=float))[None, :]
    if np.any((rho <= 0) | (rho >= 2)):
        raise DomainError("rho must lie in (0, 2)")
    p = n / 2 - gamma
    w = 4.0 + rho ** 2
    z = (4.0 - rho ** 2) / w
    log_u = math.log(16.0) + 2 * np.log(rho) - 2 * np.log(w)
    u = np.exp(log_u)
    x = z * z
    log_du = math.log(32.0) + np.log(rho) + np.log(4 - rho ** 2) - 3 * np.log(w)
    dlogP = -2 * p * rho / w
    logP = p * np.log(4.0 / w)
    B = xi / 2
    V = np.empty(np.broadcast_shapes(xi.shape, rho.shape))
    dV = np.empty_like(V)
    if np.any(xi > XI_MAX):
        raise DomainError(f"frequencies above {XI_MAX} are outside the stable range of the profiles")
    with np.errstate(divide="ignore"):
        u_switch = np.minimum(U_SWITCH, (SWITCH_XI_SQRT_U / xi) ** 2)
    near = np.broadcast_to(u < u_switch, V.shape)
    far = ~near
    pair = specfun.hyp2f1_conjugate_pair
    A = n / 4 - gamma / 2
    if far.any():
        Bf, xf = np.broadcast_to(B, V.shape)[far], np.broadcast_to(x, V.shape)[far]
        pref = np.exp(np.broadcast_to(logP, V.shape)[far] - _log_alpha0(n, gamma, 2 * Bf))
        F = pair(A, Bf, n / 2, xf)
        dF = (A * A + Bf ** 2) / (n / 2) * pair(A + 1, Bf, n / 2 + 1, xf)
        dx = np.broadcast_to(2 * z * (-16 * rho / w ** 2), V.shape)[far]
        V[far] = pref * F
        dV[far] = np.broadcast_to(dlogP, V.shape)[far] * V[far] + pref * dF * dx
    if near.any():
        Bn, un = np.broadcast_to(B, V.shape)[near], np.broadcast_to(u, V.shape)[near]
        lun = np.broadcast_to(log_u, V.shape)[near]
        P = np.exp(np.broadcast_to(logP, V.shape)[near])
        r = theta(CylinderParams(n, gamma), 2 * Bn) / d_gamma(gamma)
        A2 = n / 4 + gamma / 2
        F1 = pair(A, Bn, 1 - gamma, un)
        dF1 = (A * A + Bn ** 2) / (1 - gamma) * pair(A + 1, Bn, 2 - gamma, un)
        F2 = pair(A2, Bn, 1 + gamma, un)
        dF2 = (A2 * A2 + Bn ** 2) / (1 + gamma) * pair(A2 + 1, Bn, 2 + gamma, un)
        ug = np.exp(gamma * lun)
        inner = F1 + r * ug * F2
        ldu = np.broadcast_to(log_du, V.shape)[near]
        # u^{gamma-1} du/drho combined in logs: both factors under/overflow near rho = 0
        dinner = ((dF1 + r * ug * dF2) * np.exp(ldu)
                  + r * gamma * np.exp((gamma - 1) * lun + ldu) * F2)
        V[near] = P * inner
        dV[near] = np.broadcast_to(dlogP, V.shape)[near] * P * inner + P * dinner
    return V, dV


def mode_closed_form(params, xi, z):
    """Regular scattering profile phi(z) normalised as z^e (1 + O(z^2)) at z = 0."""
    _check_fractional(params.gamma)
    z = np.asarray(z, dtype=float)
    nu = params.nu
    e = 1 - params.n / 2 + nu
    r1 = params.n / 4 - params.gamma / 2
    F = specfun.hyp2f1_conjugate_pair((1 + nu - params.gamma) / 2, xi / 2, 1 + nu, z * z)
    return z ** e * (1 - z * z) ** r1 * F


def mode_boundary_coefficients(params, xi):
    """(A1, A2) of phi = A1 u^{n/4-g/2}(1 + ..) + A2 u^{n/4+g/2}(1 + ..), u = 1 - z^2."""
    lg = specfun.loggamma
    nu, g = params.nu, params.gamma
    half = 0.5 + nu / 2
    base = lg(1 + nu).real
    A1 = math.exp(base + lg(g).real - specfun.log_abs_gamma_sq(half + g / 2 + 0.5j * xi))
    A2 = (math.exp(base - specfun.log_abs_gamma_sq(half - g / 2 + 0.5j * xi))
          * specfun.gamma(-g).real)
    return A1, A2


# ------------------------------------------------------------ mode ODE oracle


@dataclass(frozen=True)
class ModeProfile:
    params: CylinderParams
    xi: float
    z: np.ndarray
    phi: np.ndarray
    A1: float
    A2: float
    fit_residual: float

    @property
    def symbol(self):
        """d_gamma A2 / A1, which should reproduce theta(params, xi)."""
        return d_gamma(self.params.gamma) * self.A2 / self.A1


def _frobenius_zero(params, xi, z, terms=FROBENIUS_TERMS):
    """Regular series phi = z^e sum b_j z^{2j} and its derivative at small z."""
    n, mu = params.n, params.mu
    q = n * n / 4 - params.gamma ** 2
    e = 1 - n / 2 + params.nu
    g0 = lambda m: m * m + (n - 2) * m + mu
    g1 = lambda m: -2 * m * (m - 1) - n * m - mu + q - xi * xi
    g2 = lambda m: m * m + xi * xi
    b = [1.0]
    for j in range(1, terms):
        m = e + 2 * j
        acc = b[j - 1] * g1(m - 2)
        if j >= 2:
            acc += b[j - 2] * g2(m - 4)
        b.append(-acc / g0(m))
    powers = np.array([e + 2 * j for j in range(terms)])
    coef = np.array(b)
    return np.sum(coef * z ** powers), np.sum(coef * powers * z ** (powers - 1))


def _frobenius_one(params, xi, r, terms=FROBENIUS_TERMS):
    """Coefficients c_j of the boundary series u^r sum c_j u^j, u = 1 - z^2."""
    n, mu = params.n, params.mu
    q = n * n / 4 - params.gamma ** 2
    f0 = lambda m: 4 * m * (m - 1) - 2 * (n - 2) * m + q
    f1 = lambda m: -8 * m * (m - 1) - 2 * (4 - n) * m + (mu - q - xi * xi)
    f2 = lambda m: 4 * m * m + xi * xi
    c = [1.0]
    for j in range(1, terms):
        acc = c[j - 1] * f1(r + j - 1)
        if j >= 2:
            acc += c[j - 2] * f2(r + j - 2)
        c.append(-acc / f0(r + j))
    return np.array(c)


def _mode_rhs(params, xi):
    n, mu = params.n, params.mu
    q = n * n / 4 - params.gamma ** 2

    def rhs(z, y):
        phi, dphi = y
        s = 1 - z * z
        ddphi = -(((n - 1) / z - z) * dphi + (mu / (z * z) + q / s - xi * xi) * phi) / s
        return [dphi, ddphi]
    return rhs


def solve_mode_ode(params, xi, npoints=400, rtol=1e-13):
    """Integrate the scattering ODE in z and read off its boundary coefficients."""
    _check_fractional(params.gamma)
    if npoints < 200:
        raise ValueError("npoints must be at least 200")
    if params.gamma < 1e-3:
        raise ConvergenceError("boundary exponents nearly coincide; fit is ill-conditioned")
    phi0, dphi0 = _frobenius_zero(params, xi, ODE_Z0)
    fit_z = 1 - np.geomspace(1 - FIT_WINDOW[0], 1 - FIT_WINDOW[1], FIT_POINTS)
    grid = np.linspace(ODE_Z0, ODE_Z1, npoints)
    t_eval = np.unique(np.concatenate([grid, fit_z]))
    sol = solve_ivp(_mode_rhs(params, xi), (ODE_Z0, ODE_Z1), [phi0, dphi0], method="DOP853",
                    t_eval=t_eval, rtol=rtol, atol=1e-30)
    if not sol.success:
        raise IntegrationError(f"mode ODE failed: {sol.message}")
    values = dict(zip(sol.t, sol.y[0]))
    phi_fit = np.array([values[zz] for zz in fit_z])
    u = 1 - fit_z ** 2
    r1 = params.n / 4 - params.gamma / 2
    r2 = params.n / 4 + params.gamma / 2
    j = np.arange(FROBENIUS_TERMS)
    s1 = (u[:, None] ** (r1 + j) * _frobenius_one(params, xi, r1)).sum(axis=1)
    s2 = (u[:, None] ** (r2 + j) * _frobenius_one(params, xi, r2)).sum(axis=1)
    basis = np.column_stack([s1, s2])
    scale = np.abs(basis).max(axis=0)
    coef, *_ = np.linalg.lstsq(basis / scale, phi_fit, rcond=None)
    A1, A2 = coef / scale
    resid = np.max(np.abs(basis @ (coef / scale) - phi_fit)) / np.max(np.abs(phi_fit))
    if A1 == 0:
        raise ConvergenceError("leading boundary coefficient vanished")
    return ModeProfile(params=params, xi=xi, z=grid, phi=np.array([values[zz] for zz in grid]),
                       A1=float(A1), A2=float(A2), fit_residual=float(resid))


# ------------------------------------------------------------ fields


def periodic_grid(L, N):
    return -L / 2 + L * np.arange(N) / N


@dataclass
class ExtensionField:
    """Spectral representation of a radial extension field V(rho, t).

    v(t) = Re sum_j amp_j e^{i xi_j t}; V adds the profile V_{xi_j}(rho) to
    each term.  ``rho`` is the radial grid (by default composite quadrature
    nodes) on which ``values`` and the conserved quantities are evaluated.
    """
    n: int
    gamma: float
    L: float
    t: np.ndarray
    trace: np.ndarray
    xi: np.ndarray
    amp: np.ndarray
    rule: quadrature.Rule
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def rho(self):
        return self.rule.nodes

    def profiles(self, rho=None):
        rho = self.rho if rho is None else np.asarray(rho, dtype=float)
        key = rho.tobytes()
        if key not in self._cache:
            self._cache[key] = radial_mode(self.n, self.gamma, self.xi, rho)
        return self._cache[key]

    def base_profile(self, rho=None):
        """V_0, dV_0/drho: the xi = 0 profile (extension of v = 1)."""
        rho = self.rho if rho is None else np.asarray(rho, dtype=float)
        key = ("base", rho.tobytes())
        if key not in self._cache:
            V, dV = radial_mode(self.n, self.gamma, [0.0], rho)
            self._cache[key] = (V[0], dV[0])
        return self._cache[key]

    def _phases(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.amp[:, None] * np.exp(1j * self.xi[:, None] * t[None, :])

    def trace_at(self, t):
        out = np.real(self._phases(t).sum(axis=0))
        return out if np.ndim(t) else float(out[0])

    def evaluate(self, t, rho=None):
        """V, dV/dt, dV/drho on (rho, t), each of shape (len(rho), len(t))."""
        M, D = self.profiles(rho)
        ph = self._phases(t)
        V = np.real(M.T @ ph)
        Vt = np.real(M.T @ (1j * self.xi[:, None] * ph))
        Vr = np.real(D.T @ ph)
        return V, Vt, Vr

    def values(self, rho=None):
        return self.evaluate(self.t, rho)[0]


def extension_field(v, L, n, gamma, rule=None, cutoff=MODE_CUTOFF):
    """Extend periodic samples ``v`` (on ``periodic_grid(L, len(v))``) into the half-space."""
    _check_fractional(gamma)
    CylinderParams(n, gamma)
    v = np.asarray(v, dtype=float)
    N = v.size
    if N < 2:
        raise ValueError("need at least two samples")
    t = periodic_grid(L, N)
    vhat = np.fft.rfft(v) / N
    xi = 2 * np.pi * np.arange(vhat.size) / L
    weight = np.full(vhat.size, 2.0)
    weight[0] = 1.0
    if N % 2 == 0:
        weight[-1] = 1.0
    amp = weight * vhat * np.exp(-1j * xi * t[0])
    keep = np.abs(amp) > cutoff * np.abs(amp).max() if np.any(amp) else np.zeros(amp.size, bool)
    keep[0] = True
    high = xi > XI_MAX
    dropped = np.abs(amp[keep & high]).sum()
    if dropped > BAND_TOL * max(np.abs(v).max(), 1e-300):
        raise DomainError(f"trace is not band-limited to |xi| <= {XI_MAX} (dropped amplitude {dropped:.2e})")
    keep &= ~high
    rule = quadrature.composite() if rule is None else rule
    return ExtensionField(n=n, gamma=gamma, L=L, t=t, trace=v, xi=xi[keep], amp=amp[keep], rule=rule)


def mode_field(xi, amplitude, n, gamma, L=None, rule=None):
    """Extension of the single real mode v(t) = amplitude cos(xi t)."""
    L = 2 * np.pi / xi if (L is None and xi > 0) else (L or 2 * np.pi)
    rule = quadrature.composite() if rule is None else rule
    t = periodic_grid(L, 64)
    return ExtensionField(n=n, gamma=gamma, L=L, t=t, trace=amplitude * np.cos(xi * t),
                          xi=np.array([float(xi)]), amp=np.array([complex(amplitude)]), rule=rule)


# ------------------------------------------------------------ conserved quantities


@dataclass(frozen=True)
class HamiltonianValue:
    t: float
    H: float
    kinetic_t: float
    kinetic_rho: float
    potential: float
    boundary: float

    @property
    def scale(self):
        return max(abs(self.kinetic_t), abs(self.kinetic_rho), abs(self.potential), abs(self.boundary))


def _boundary_potential(n, gamma, v):
    return hamiltonian_constant(n, gamma) * np.abs(v) ** (2 * n / (n - 2 * gamma))


def hamiltonian_from_samples(rule, rho_values, n, gamma, V, Vt, Vr, v, t=math.nan):
    """H from sampled V, dV/dt, dV/drho on the nodes of ``rule``."""
    m = metric_coeffs(rho_values, n, gamma)
    ra = rho_values ** (1 - 2 * gamma)
    # square after weighting: rho^a dV/drho^2 is tame where dV/drho alone overflows
    rh = np.sqrt(ra)
    kt = 0.5 * rule.integrate(ra * m.e1 * Vt ** 2)
    kr = -0.5 * rule.integrate(m.e * (rh * Vr) ** 2)
    pot = -0.5 * rule.integrate(ra * m.e2 * V ** 2)
    G = float(_boundary_potential(n, gamma, v))
    return HamiltonianValue(t=float(t), H=float(kt + kr + pot + G), kinetic_t=float(kt),
                            kinetic_rho=float(kr), potential=float(pot), boundary=G)


def hamiltonian(field, t):
    """Conserved quantity in the rho chart, evaluated at time t."""
    V, Vt, Vr = (a[:, 0] for a in field.evaluate([t]))
    return hamiltonian_from_samples(field.rule, field.rho, field.n, field.gamma, V, Vt, Vr,
                                    field.trace_at(t), t)


def star_frame(field, t):
    """Field in the rho* chart: V* = V / V_0 with its derivatives and chart data."""
    n, g = field.n, field.gamma
    p = n / 2 - g
    V, Vt, Vr = (a[:, 0] for a in field.evaluate([t]))
    V0, dV0 = field.base_profile()
    Vs = V / V0
    Vst = Vt / V0
    Vsr = (Vr * V0 - V * dV0) / V0 ** 2
    lam = V0 ** (1.0 / p)
    rho = field.rho
    rho_star = rho * lam
    drho_star = rho_star * (1.0 / rho + dV0 / (p * V0))
    return Vs, Vst, Vsr, lam, rho_star, drho_star


def _star_integrals(field, t, weights):
    n, g = field.n, field.gamma
    Vs, Vst, Vsr, lam, rs, drs = star_frame(field, t)
    m = metric_coeffs(field.rho, n, g)
    ra = rs ** (1 - 2 * g)
    if weights == "exact":
        kt = field.rule.integrate(ra * lam ** (n - 1) * m.e1 * Vst ** 2)
        kr = -field.rule.integrate(lam ** (n - 1) * m.e * (np.sqrt(ra) * Vsr) ** 2)
    elif weights == "printed":
        # (rho*/rho)^2 e1 and (rho*/rho)^2, integrated in d rho* = rho*' d rho
        kt = field.rule.integrate(ra * lam ** 2 * m.e1 * Vst ** 2 * drs)
        kr = -field.rule.integrate(lam ** 2 * (np.sqrt(ra) * Vsr / drs) ** 2 * drs)
    else:
        raise ValueError(f"unknown weights {weights!r}")
    return kt, kr, field.trace_at(t)


def hamiltonian_star(field, t, weights="exact"):
    """Conserved quantity in the rho* chart.

    ``weights='exact'`` uses the weights induced by the rho* metric,
    (rho*/rho)^{n-1} e1 and (rho*/rho)^{n-1} e (after changing the variable of
    integration back to rho).  ``'printed'`` uses (rho*/rho)^2 e1 and
    (rho*/rho)^2 in the rho* variable; it is kept for comparison.
    """
    n, g = field.n, field.gamma
    kt, kr, v = _star_integrals(field, t, weights)
    kt, kr = 0.5 * kt, 0.5 * kr
    c_over = yamabe_constant(n, g) / dtilde_gamma(g)
    G = c_over * ((n - 2 * g) / (2 * n) * abs(v) ** (2 * n / (n - 2 * g)) - 0.5 * v * v)
    return HamiltonianValue(t=float(t), H=float(kt + kr + G), kinetic_t=float(kt),
                            kinetic_rho=float(kr), potential=0.0, boundary=float(G))


def second_variation(field, t, weights="exact"):
    """d^2/d eps^2 of the rho* Hamiltonian at V* = 1 in the direction of ``field``.

    The direction is the rho*-chart field V / V_0, whose trace is ``field``'s trace.
    With ``weights='exact'`` this is the true second derivative (integral
    factor 1); ``'printed'`` keeps the factor 1/2 and the (rho*/rho)^2 weights.
    """
    n, g = field.n, field.gamma
    kt, kr, v = _star_integrals(field, t, weights)
    factor = 1.0 if weights == "exact" else 0.5
    c_over = yamabe_constant(n, g) / dtilde_gamma(g)
    return float(c_over * 4 * g / (n - 2 * g) * v * v + factor * (kt + kr))


def neumann_trace(field, t, rho_nodes=RICHARDSON_RHO, tol=1e-3):
    """-dtilde lim rho^a dV/drho at times t by Richardson extrapolation.

    Near rho = 0, -dtilde rho^a dV/drho = T + c1 rho^{2-2 gamma} + c2 rho^2 + ...,
    and the three nodes eliminate c1 and c2.
    """
    g = field.gamma
    rho = np.asarray(rho_nodes, dtype=float)
    _, _, Vr = field.evaluate(t, rho)
    vals = -dtilde_gamma(g) * rho[:, None] ** (1 - 2 * g) * Vr
    design = np.column_stack([np.ones(3), rho ** (2 - 2 * g), rho ** 2])
    T = np.linalg.solve(design, vals)[0]
    two = np.linalg.solve(design[1:, :2], vals[1:])[0]
    scale = np.maximum(np.abs(vals).max(axis=0), 1e-300)
    if np.any(np.abs(T - two) > tol * scale):
        raise ConvergenceError("Richardson extrapolation of the Neumann data did not settle")
    return T if np.ndim(t) else float(T[0])
