"""Complex Gamma, digamma, Beta and Gauss hypergeometric functions.

Every public function accepts Python scalars or numpy arrays.  The scalar
kernels are compiled with numba unless ``CYLFRAC_DISABLE_NUMBA=1``, in which
case a vectorised numpy path is used instead (see ``cylfrac._accel``).
"""
import cmath
import math

import numpy as np

from ._accel import USE_NUMBA, njit
from .errors import ConvergenceError, PoleError

# Lanczos approximation, g = 671/128 with 14 correction terms.
LANCZOS_G = 5.2421875
LANCZOS_C0 = 0.999999999999997092
LANCZOS_COEF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
SQRT_2PI = 2.5066282746310005
LOG_PI = 1.1447298858494002

HYP_TOL = 1e-15
HYP_MAX_TERMS = 100_000
HYP_CONNECTION_X = 0.75
HYP_INTEGER_GUARD = 1e-6


def _is_pole(z):
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.floor(z.real))


def _check_poles(z, name="gamma"):
    if np.any(_is_pole(z)):
        raise PoleError(f"{name}: argument is a non-positive integer")


# ---------------------------------------------------------------- log Gamma


@njit
def _lgamma_right(z):
    tmp = z + LANCZOS_G
    tmp = (z + 0.5) * cmath.log(tmp) - tmp
    ser = LANCZOS_C0 + 0j
    y = z
    for c in LANCZOS_COEF:
        y = y + 1.0
        ser = ser + c / y
    return tmp + cmath.log(SQRT_2PI * ser / z)


@njit
def _lgamma_scalar(z):
    flip = z.imag < 0.0
    if flip:
        z = z.conjugate()
    if z.real < 0.5:
        res = LOG_PI - cmath.log(cmath.sin(math.pi * z)) - _lgamma_right(1.0 - z)
    else:
        res = _lgamma_right(z)
    if flip:
        res = res.conjugate()
    return res


@njit
def _lgamma_loop(zs):
    out = np.empty(zs.shape[0], dtype=np.complex128)
    for i in range(zs.shape[0]):
        out[i] = _lgamma_scalar(zs[i])
    return out


def _lgamma_vec(z):
    z = np.array(z, dtype=complex)
    flip = z.imag < 0
    z[flip] = np.conj(z[flip])
    refl = z.real < 0.5
    w = np.where(refl, 1.0 - z, z)
    tmp = w + LANCZOS_G
    tmp = (w + 0.5) * np.log(tmp) - tmp
    ser = np.full_like(w, LANCZOS_C0)
    y = w.copy()
    for c in LANCZOS_COEF:
        y = y + 1.0
        ser = ser + c / y
    lg = tmp + np.log(SQRT_2PI * ser / w)
    if refl.any():
        with np.errstate(all="ignore"):
            lg[refl] = LOG_PI - np.log(np.sin(np.pi * z[refl])) - lg[refl]
    lg[flip] = np.conj(lg[flip])
    return lg


def _apply(kernel_loop, kernel_vec, z):
    arr = np.asarray(z, dtype=complex)
    flat = np.ascontiguousarray(arr.ravel())
    out = kernel_loop(flat) if USE_NUMBA else kernel_vec(flat)
    out = out.reshape(arr.shape)
    return complex(out) if arr.ndim == 0 else out


def loggamma(z):
    """Principal-sheet-agnostic log Gamma: ``exp(loggamma(z)) == gamma(z)``.

    The imaginary part is only defined modulo 2*pi.
    """
    _check_poles(z, "loggamma")
    return _apply(_lgamma_loop, _lgamma_vec, z)


def gamma(z):
    """Gamma function for complex arguments.

    Lanczos approximation on Re z >= 1/2 and reflection elsewhere; the lower
    half-plane is obtained by conjugation, so ``gamma(conj(z)) == conj(gamma(z))``
    holds exactly.
    """
    return np.exp(loggamma(z)) if np.ndim(z) else cmath.exp(loggamma(z))


def rgamma(z):
    """1/Gamma(z), equal to zero at the poles."""
    arr = np.asarray(z, dtype=complex)
    poles = _is_pole(arr)
    safe = np.where(poles, 0.5, arr)
    out = np.exp(-np.asarray(_apply(_lgamma_loop, _lgamma_vec, safe)))
    out = np.where(poles, 0.0, out)
    return complex(out) if arr.ndim == 0 else out


def log_abs_gamma_sq(z):
    """log |Gamma(z)|^2 as a real number (overflow-safe)."""
    lg = loggamma(z)
    return 2.0 * np.real(lg) if np.ndim(lg) else 2.0 * lg.real


def abs_gamma_sq(z):
    """|Gamma(z)|^2 computed as Gamma(z) * Gamma(conj z)."""
    arr = np.asarray(z, dtype=complex)
    prod = np.real(gamma(arr) * gamma(np.conj(arr)))
    return float(prod) if arr.ndim == 0 else prod


def beta(z1, z2):
    """Euler Beta function Gamma(z1) Gamma(z2) / Gamma(z1 + z2)."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    _check_poles(z1, "beta")
    _check_poles(z2, "beta")
    _check_poles(z1 + z2, "beta")
    out = np.exp(
        np.asarray(loggamma(z1)) + np.asarray(loggamma(z2)) - np.asarray(loggamma(z1 + z2))
    )
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- digamma


@njit
def _digamma_scalar(z):
    flip = z.imag < 0.0
    if flip:
        z = z.conjugate()
    acc = 0j
    if z.real < 0.5:
        # psi(z) = psi(1 - z) - pi cot(pi z)
        acc = -math.pi / cmath.tan(math.pi * z)
        z = 1.0 - z
    while z.real < 10.0:
        acc = acc - 1.0 / z
        z = z + 1.0
    w = 1.0 / (z * z)
    tail = w * (1.0 / 12 - w * (1.0 / 120 - w * (1.0 / 252 - w * (1.0 / 240 - w * (
        1.0 / 132 - w * (691.0 / 32760 - w / 12.0))))))
    res = acc + cmath.log(z) - 0.5 / z - tail
    if flip:
        res = res.conjugate()
    return res


@njit
def _digamma_loop(zs):
    out = np.empty(zs.shape[0], dtype=np.complex128)
    for i in range(zs.shape[0]):
        out[i] = _digamma_scalar(zs[i])
    return out


def _digamma_vec(z):
    z = np.array(z, dtype=complex)
    flip = z.imag < 0
    z[flip] = np.conj(z[flip])
    acc = np.zeros_like(z)
    refl = z.real < 0.5
    if refl.any():
        acc[refl] = -np.pi / np.tan(np.pi * z[refl])
        z[refl] = 1.0 - z[refl]
    while True:
        low = z.real < 10.0
        if not low.any():
            break
        acc[low] -= 1.0 / z[low]
        z[low] += 1.0
    w = 1.0 / (z * z)
    tail = w * (1.0 / 12 - w * (1.0 / 120 - w * (1.0 / 252 - w * (1.0 / 240 - w * (
        1.0 / 132 - w * (691.0 / 32760 - w / 12.0))))))
    res = acc + np.log(z) - 0.5 / z - tail
    res[flip] = np.conj(res[flip])
    return res


def digamma(z):
    """Digamma psi(z) = Gamma'(z)/Gamma(z).

    Shifted by the recurrence to Re z >= 10, then the Stirling-type
    asymptotic series with Bernoulli coefficients up to z**-14.
    """
    _check_poles(z, "digamma")
    return _apply(_digamma_loop, _digamma_vec, z)


# ---------------------------------------------------------------- 2F1


@njit
def _hyp_series_scalar(a, b, c, x, tol, maxterms):
    term = 1.0 + 0j
    s = 1.0 + 0j
    small = 0
    for k in range(maxterms):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        s = s + term
        if abs(term) < tol * abs(s):
            small += 1
            if small >= 3:
                return s, k + 1
        else:
            small = 0
    return s, -1


@njit
def _hyp_series_loop(a, b, c, xs, tol, maxterms):
    out = np.empty(xs.shape[0], dtype=np.complex128)
    nterms = np.empty(xs.shape[0], dtype=np.int64)
    for i in range(xs.shape[0]):
        out[i], nterms[i] = _hyp_series_scalar(a, b, c, xs[i], tol, maxterms)
    return out, nterms


def _hyp_series_vec(a, b, c, xs, tol, maxterms):
    xs = np.asarray(xs, dtype=float)
    term = np.ones(xs.shape, dtype=complex)
    s = np.ones(xs.shape, dtype=complex)
    small = np.zeros(xs.shape, dtype=np.int64)
    nterms = np.full(xs.shape, -1, dtype=np.int64)
    active = np.ones(xs.shape, dtype=bool)
    for k in range(maxterms):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1.0)) * xs
        s = np.where(active, s + term, s)
        conv = np.abs(term) < tol * np.abs(s)
        small = np.where(conv, small + 1, 0)
        done = active & (small >= 3)
        nterms[done] = k + 1
        active &= ~done
        if not active.any():
            break
    return s, nterms


def hyp2f1_series(a, b, c, x, tol=HYP_TOL, maxterms=HYP_MAX_TERMS):
    """Plain power series of 2F1; raises if it does not converge.

    Stops once three consecutive terms fall below ``tol`` times the partial sum.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    a, b, c = complex(a), complex(b), complex(c)
    if USE_NUMBA:
        vals, nterms = _hyp_series_loop(a, b, c, np.ascontiguousarray(xs), tol, maxterms)
    else:
        vals, nterms = _hyp_series_vec(a, b, c, xs, tol, maxterms)
    if np.any(nterms < 0):
        raise ConvergenceError(f"2F1 series did not converge within {maxterms} terms")
    return complex(vals[0]) if np.ndim(x) == 0 else vals


def _connection_coefficients(a, b, c):
    """Coefficients of the x -> 1 - x connection formula (non-integer c-a-b)."""
    s = c - a - b
    lg_c = _lgamma_scalar(c)
    first = cmath.exp(lg_c + _lgamma_scalar(s)) * rgamma(c - a) * rgamma(c - b)
    second = cmath.exp(lg_c + _lgamma_scalar(-s)) * rgamma(a) * rgamma(b)
    return first, second


def hyp2f1(a, b, c, x, connection_above=HYP_CONNECTION_X):
    """Gauss hypergeometric function 2F1(a, b; c; x) for real x in [0, 1].

    The power series is used for x <= ``connection_above``.  Above that the x -> 1 - x
    connection formula is applied; it needs c - a - b away from an integer
    (the logarithmic case is not supported).  Negative x with |x| < 1 goes
    through the plain series.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if _is_pole(c):
        raise PoleError("2F1: c is a non-positive integer")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xs) > 1.0):
        raise ConvergenceError("2F1: |x| > 1 is outside the supported range")
    out = np.empty(xs.shape, dtype=complex)
    near = xs > connection_above
    if np.any(~near):
        out[~near] = np.atleast_1d(hyp2f1_series(a, b, c, xs[~near]))
    if np.any(near):
        s = c - a - b
        if abs(s - round(s.real)) < HYP_INTEGER_GUARD:
            raise ConvergenceError("2F1: c - a - b is (nearly) an integer; logarithmic case unsupported")
        if np.any(xs[near] == 1.0) and s.real <= 0:
            raise ConvergenceError("2F1: diverges at x = 1 when Re(c - a - b) <= 0")
        first, second = _connection_coefficients(a, b, c)
        u = 1.0 - xs[near]
        f1 = np.atleast_1d(hyp2f1_series(a, b, 1.0 - s, u))
        f2 = np.atleast_1d(hyp2f1_series(c - a, c - b, 1.0 + s, u))
        with np.errstate(divide="ignore", invalid="ignore"):
            pw = np.where(u > 0, np.exp(s * np.log(np.where(u > 0, u, 1.0))), 0.0)
        out[near] = first * f1 + second * pw * f2
    return complex(out[0]) if np.ndim(x) == 0 else out


def hyp2f1_connection_residual(a, b, c, x):
    """Relative residual between the series value and the connection formula at x."""
    direct = hyp2f1_series(a, b, c, x)
    s = complex(c) - complex(a) - complex(b)
    if abs(s - round(s.real)) < HYP_INTEGER_GUARD:
        raise ConvergenceError("2F1: c - a - b is (nearly) an integer; logarithmic case unsupported")
    first, second = _connection_coefficients(complex(a), complex(b), complex(c))
    u = 1.0 - x
    conn = first * hyp2f1_series(a, b, 1.0 - s, u) + second * u ** s * hyp2f1_series(c - a, c - b, 1.0 + s, u)
    return abs(direct - conn) / abs(direct)


# ---------------------------------------------------------------- conjugate pairs
#
# With b = conj(a) the series of 2F1(a, b; c; x) has real terms
# |(a)_j|^2 / ((c)_j j!) x^j.  The radial extension profiles only ever need
# this case, evaluated on a (frequency x radius) table, so it gets its own
# real-arithmetic kernel.


@njit
def _pair_series_loop(re_a, im_a2, c, xs, tol, maxterms):
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        term = 1.0
        s = 1.0
        small = 0
        ok = False
        for k in range(maxterms):
            ak = re_a[i] + k
            term = term * (ak * ak + im_a2[i]) / ((c[i] + k) * (k + 1.0)) * xs[i]
            s += term
            if abs(term) < tol * abs(s):
                small += 1
                if small >= 3:
                    ok = True
                    break
            else:
                small = 0
        out[i] = s if ok else np.nan
    return out


def _pair_series_vec(re_a, im_a2, c, xs, tol, maxterms):
    term = np.ones(xs.shape)
    s = np.ones(xs.shape)
    small = np.zeros(xs.shape, dtype=np.int64)
    active = np.ones(xs.shape, dtype=bool)
    for k in range(maxterms):
        ak = re_a + k
        term = term * (ak * ak + im_a2) / ((c + k) * (k + 1.0)) * xs
        s = np.where(active, s + term, s)
        small = np.where(np.abs(term) < tol * np.abs(s), small + 1, 0)
        active &= small < 3
        if not active.any():
            return s
    s[active] = np.nan
    return s


def hyp2f1_conjugate_pair(re_a, im_a, c, x, tol=HYP_TOL, maxterms=HYP_MAX_TERMS, use_numba=None):
    """Real series for 2F1(re_a + i im_a, re_a - i im_a; c; x), |x| < 1; broadcasts."""
    re_a, im_a, c, x = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (re_a, im_a, c, x)))
    shape = x.shape
    args = [np.array(v, dtype=float).ravel() for v in (re_a, im_a ** 2, c, x)]
    if np.any(np.abs(args[3]) >= 1.0):
        raise ConvergenceError("conjugate-pair series needs |x| < 1")
    numba = USE_NUMBA if use_numba is None else use_numba
    out = _pair_series_loop(*args, tol, maxterms) if numba else _pair_series_vec(*args, tol, maxterms)
    if np.any(np.isnan(out)):
        raise ConvergenceError(f"conjugate-pair 2F1 series did not converge within {maxterms} terms")
    return out.reshape(shape)
