"""Fourier symbol of the conformal fractional Laplacian on R x S^{n-1}.

Mode ``k`` of the operator acts on ``v_k(t)`` as the multiplier

    theta(xi) = 2^{2 gamma} |Gamma(1/2 + gamma/2 + nu/2 + i xi/2)|^2
                          / |Gamma(1/2 - gamma/2 + nu/2 + i xi/2)|^2,

with ``nu = sqrt((n/2 - 1)^2 + k (k + n - 2))``.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import specfun
from .errors import DomainError, PoleError

INTEGER_GUARD = 1e-8


@dataclass(frozen=True)
class CylinderParams:
    n: int
    gamma: float
    k: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension n must be an integer >= 2, got {self.n}")
        if not 0.0 < self.gamma < self.n / 2:
            raise DomainError(f"order gamma must lie in (0, n/2), got {self.gamma}")
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"mode index k must be a non-negative integer, got {self.k}")

    @property
    def s(self):
        return self.n / 2 + self.gamma

    @property
    def a(self):
        return 1.0 - 2.0 * self.gamma

    @property
    def mu(self):
        return -self.k * (self.k + self.n - 2)

    @property
    def nu(self):
        """sqrt((n/2 - 1)^2 - mu_k), the spherical-harmonic shift."""
        return mode_shift(self.n, self.k)

    @property
    def near_integer(self):
        return near_positive_integer(self.gamma)


def near_positive_integer(gamma):
    """True within INTEGER_GUARD of 1, 2, ...; gamma -> 0+ is a regular limit."""
    m = round(gamma)
    return m >= 1 and abs(gamma - m) <= INTEGER_GUARD


def mode_shift(n, k):
    disc = (n / 2 - 1) ** 2 + k * (k + n - 2)
    if disc < 0:
        raise DomainError("negative discriminant (n/2-1)^2 - mu_k")
    return math.sqrt(disc)


def _gamma_args(params, xi):
    xi = np.asarray(xi, dtype=float)
    base = 0.5 + params.nu / 2 + 0.5j * xi
    return base + params.gamma / 2, base - params.gamma / 2


def log_theta(params, xi):
    """Natural log of the symbol; safe for large |xi|."""
    if params.near_integer:
        raise DomainError(
            f"gamma={params.gamma} is within {INTEGER_GUARD} of an integer; use theta_integer")
    up, down = _gamma_args(params, xi)
    if np.any(specfun._is_pole(down)):
        raise PoleError("theta: denominator Gamma at a pole")
    return (2 * params.gamma * math.log(2.0)
            + specfun.log_abs_gamma_sq(up) - specfun.log_abs_gamma_sq(down))


def theta(params, xi):
    """Symbol Theta^k_gamma(xi) (real, positive, even in xi)."""
    xi = np.asarray(xi, dtype=float)
    # evaluate at |xi| so that theta(-xi) == theta(xi) bit for bit
    out = np.exp(log_theta(params, np.abs(xi)))
    return float(out) if out.ndim == 0 else out


def theta_integer(n, m, k, xi):
    """Symbol of the GJMS operator of integer order m as a polynomial in xi.

    2^{2m} prod_{j=1}^{m} ( [2(m-j) - m + 1 + nu]^2 / 4 + xi^2 / 4 ).
    """
    if int(m) != m or m < 1 or m >= n / 2:
        raise DomainError(f"integer order m must satisfy 1 <= m < n/2, got m={m}, n={n}")
    nu = mode_shift(n, k)
    disc = (n / 2 - 1) ** 2 + k * (k + n - 2)
    xi2 = np.asarray(xi, dtype=float) ** 2
    out = np.full(xi2.shape, 2.0 ** (2 * m))
    for j in range(1, m + 1):
        shift = 2 * (m - j) - m + 1
        centre_sq = disc if shift == 0 else (shift + nu) ** 2
        out = out * (centre_sq / 4 + xi2 / 4)
    return float(out) if out.ndim == 0 else out


def yamabe_constant(n, gamma):
    """c_{n,gamma}: constant fractional curvature of the cylinder R x S^{n-1}."""
    _check_order(n, gamma)
    ratio = math.exp(specfun.loggamma((n / 2 + gamma) / 2).real
                     - specfun.loggamma((n / 2 - gamma) / 2).real)
    return 2.0 ** (2 * gamma) * ratio ** 2


def hardy_constant(n, gamma):
    """Sharp constant of the fractional Hardy inequality.

    It coincides with the cylinder curvature ``yamabe_constant(n, gamma)``.
    """
    return yamabe_constant(n, gamma)


def sphere_curvature(n, gamma):
    """Q_gamma of the round unit sphere S^n: Gamma(n/2+gamma)/Gamma(n/2-gamma)."""
    _check_order(n, gamma)
    return math.exp(specfun.loggamma(n / 2 + gamma).real - specfun.loggamma(n / 2 - gamma).real)


def _check_order(n, gamma):
    if not 0.0 < gamma < n / 2:
        raise DomainError(f"gamma must lie in (0, n/2), got gamma={gamma}, n={n}")


def _real_gamma(x):
    if specfun._is_pole(x):
        raise PoleError(f"Gamma pole at {x}")
    return specfun.gamma(x).real


def d_gamma(gamma):
    """Normalisation of the scattering operator: 2^{2g} Gamma(g)/Gamma(-g)."""
    return 2.0 ** (2 * gamma) * _real_gamma(gamma) / _real_gamma(-gamma)


def dtilde_gamma(gamma):
    """Extension (Neumann) constant: -2^{2g-1} Gamma(g)/(g Gamma(-g))."""
    return -(2.0 ** (2 * gamma - 1)) * _real_gamma(gamma) / (gamma * _real_gamma(-gamma))


def kappa_constant(n, gamma):
    """Singular-integral constant of (-Delta)^gamma on R^n."""
    return (math.pi ** (-n / 2) * 2.0 ** (2 * gamma) * gamma
            * _real_gamma(n / 2 + gamma) / _real_gamma(1 - gamma))


def hamiltonian_constant(n, gamma):
    """C_{n,gamma} = (n - 2 gamma)/(2n) * c_{n,gamma} / dtilde_gamma."""
    return (n - 2 * gamma) / (2 * n) * yamabe_constant(n, gamma) / dtilde_gamma(gamma)


@dataclass(frozen=True)
class NormalizationConstants:
    n: int
    gamma: float
    c_ngamma: float
    d_gamma: float
    dtilde_gamma: float
    kappa_ngamma: float
    C_hamiltonian: float
    Q_sphere: float


def scattering_constants(n, gamma):
    """All normalisation constants at (n, gamma).

    ``dtilde_gamma``, ``kappa_ngamma`` and ``C_hamiltonian`` are only defined
    for gamma in (0, 1); outside that range they are reported as NaN.
    """
    _check_order(n, gamma)
    if near_positive_integer(gamma):
        raise PoleError(f"gamma={gamma} is an integer: Gamma(-gamma) has a pole")
    small = gamma < 1.0
    return NormalizationConstants(
        n=n,
        gamma=gamma,
        c_ngamma=yamabe_constant(n, gamma),
        d_gamma=d_gamma(gamma),
        dtilde_gamma=dtilde_gamma(gamma) if small else math.nan,
        kappa_ngamma=kappa_constant(n, gamma) if small else math.nan,
        C_hamiltonian=hamiltonian_constant(n, gamma) if small else math.nan,
        Q_sphere=sphere_curvature(n, gamma),
    )


def apply_multiplier(vhat, xi, params):
    """Multiply Fourier coefficients ``vhat`` (at frequencies ``xi``) by theta."""
    vhat = np.asarray(vhat, dtype=complex)
    xi = np.asarray(xi, dtype=float)
    if vhat.shape != xi.shape:
        raise ValueError("vhat and xi must have the same shape")
    if not np.all(np.isfinite(xi)):
        raise DomainError("frequencies must be finite reals")
    return vhat * theta(params, xi)
