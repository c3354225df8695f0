"""Metric data of the compactified AdS-type extension and related constants.

The extension lives on rho in (0, 2) with compactified metric

    d rho^2 + (1 + rho^2/4)^2 dt^2 + (1 - rho^2/4)^2 g_{S^{n-1}},

and radial fields V(rho, t) satisfy a weighted divergence equation whose
weights e, e1, e2 and zeroth-order term E are computed here.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import specfun
from .errors import DomainError
from .symbol import _check_order, d_gamma, near_positive_integer, sphere_curvature, yamabe_constant

RHO_STAR_SWITCH = 0.5
SERIES_TERMS = 2000


@dataclass(frozen=True)
class MetricCoefficients:
    rho: np.ndarray
    e: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    E: np.ndarray


def _check_rho(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any((rho <= 0) | (rho >= 2)):
        raise DomainError("rho must lie in the open interval (0, 2)")
    return rho


def metric_coeffs(rho, n, gamma):
    rho = _check_rho(rho)
    if not 0.0 < gamma < 1.0:
        raise DomainError("metric coefficients need gamma in (0, 1)")
    a = 1.0 - 2.0 * gamma
    q = rho ** 2 / 4
    plus, minus = 1.0 + q, 1.0 - q
    e = plus * minus ** (n - 1)
    e1 = minus ** (n - 1) / plus
    e2 = (n - 1 + a) / 4 * minus ** (n - 2) * (n - 2 + n * q)
    E = (n - 1 + a) / 4 * rho ** a * (n - 2 + n * q) / (plus * minus)
    return MetricCoefficients(rho=rho, e=e, e1=e1, e2=e2, E=E)


def rho_to_z(rho):
    """z = tanh(sigma) = (4 - rho^2)/(4 + rho^2)."""
    rho = np.asarray(rho, dtype=float)
    return (4.0 - rho ** 2) / (4.0 + rho ** 2)


def zero_mode_alpha(n, gamma):
    """Leading boundary coefficient of the regular k=0, xi=0 scattering profile."""
    lg = specfun.loggamma
    return math.exp((lg(n / 2) + lg(gamma) - 2 * lg(n / 4 + gamma / 2)).real)


@dataclass(frozen=True)
class DefiningFunction:
    rho: np.ndarray
    rho_star: np.ndarray
    rho_star_0: float


def special_defining_function(rho, n, gamma):
    """Special defining function rho*(rho) that removes the E-term.

    (rho*)^{n-s} = alpha^{-1} (4 rho/(4+rho^2))^{n/2-gamma}
                   2F1(n/4-gamma/2, n/4-gamma/2; n/2; z^2),  z = (4-rho^2)/(4+rho^2),

    and rho* increases from 0 to rho*_0 = alpha^{-1/(n-s)} on (0, 2).
    """
    rho = _check_rho(rho)
    _check_order(n, gamma)
    if near_positive_integer(gamma):
        raise DomainError("special defining function needs non-integer gamma")
    p = n / 2 - gamma  # = n - s
    alpha = zero_mode_alpha(n, gamma)
    x = rho_to_z(rho) ** 2
    h = n / 4 - gamma / 2
    f = np.real(specfun.hyp2f1(h, h, n / 2, x, connection_above=RHO_STAR_SWITCH))
    power = f / alpha * (4 * rho / (4 + rho ** 2)) ** p
    star = power ** (1.0 / p)
    return DefiningFunction(rho=rho, rho_star=star, rho_star_0=alpha ** (-1.0 / p))


def expansion_coefficient(n, gamma):
    """Predicted coefficient of rho^{2 gamma} in rho*/rho - 1 near rho = 0."""
    return 2 * yamabe_constant(n, gamma) / ((n - 2 * gamma) * d_gamma(gamma))


# ------------------------------------------------------------ bubble


def bubble_constant(n, gamma):
    """Amplitude C of the homoclinic profile C cosh(t)^{-(n-2 gamma)/2}."""
    _check_order(n, gamma)
    base = yamabe_constant(n, gamma) / sphere_curvature(n, gamma)
    return base ** (-(n - 2 * gamma) / (4 * gamma))


def bubble_profile(t, n, gamma):
    t = np.asarray(t, dtype=float)
    return bubble_constant(n, gamma) * np.cosh(t) ** (-(n - 2 * gamma) / 2)


# ------------------------------------------------------------ X(n, gamma)


def X_function(n, gamma):
    """X(n, g) = G(n/4+g/2) G(n/4-g/2+1/2) / (G(n/4-g/2) G(n/4+g/2+1/2)), G = Gamma."""
    if not 0.0 <= gamma < n / 2:
        raise DomainError("X needs 0 <= gamma < n/2")
    lg = specfun.loggamma
    b, g = n / 4, gamma / 2
    return math.exp((lg(b + g) + lg(b - g + 0.5) - lg(b - g) - lg(b + g + 0.5)).real)


def _X_partials_digamma(n, gamma):
    psi = specfun.digamma
    b, g = n / 4, gamma / 2
    p1, p2, p3, p4 = (np.real(psi(np.asarray(v, dtype=float)))
                      for v in (b + g, b - g + 0.5, b - g, b + g + 0.5))
    dn = 0.25 * (p1 + p2 - p3 - p4)
    dg = 0.5 * (p1 - p2 + p3 - p4)
    return dn, dg


def _X_partials_series(n, gamma, terms=SERIES_TERMS):
    """Termwise positive/negative series plus a closed-form midpoint tail."""
    n = np.asarray(n, dtype=float)[..., None]
    gamma = np.asarray(gamma, dtype=float)[..., None]
    m = np.arange(terms, dtype=float)
    b, g = n / 4, gamma / 2
    da = ((m + b) ** 2 - g ** 2)
    db = ((m + b + 0.5) ** 2 - g ** 2)
    dn = (gamma / 4 * (m + n / 4 + 0.25) / (da * db)).sum(axis=-1)
    dg = (-0.5 * ((m + b + 0.5) * (m + b) + g ** 2) / (db * da)).sum(axis=-1)
    X = terms - 0.5
    dn_tail = -0.25 * np.log((X + b - g) * (X + b + 0.5 + g) / ((X + b + g) * (X + b + 0.5 - g)))
    dg_tail = -0.5 * np.log((X + b + 0.5 - g) * (X + b + 0.5 + g) / ((X + b + g) * (X + b - g)))
    return dn + dn_tail[..., 0], dg + dg_tail[..., 0]


def X_partials(n, gamma, method="digamma"):
    """(d/dn log X, d/dgamma log X); ``method`` is 'digamma' or 'series'."""
    if method == "digamma":
        out = _X_partials_digamma(n, gamma)
    elif method == "series":
        out = _X_partials_series(n, gamma)
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.ndim(out[0]) == 0:
        return float(out[0]), float(out[1])
    return out
