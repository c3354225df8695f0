"""The gamma = 1 radial Yamabe ODE on the cylinder and its phase portrait.

    v'' = ((n-2)^2/4) (v - v^{(n+2)/(n-2)}),
    H1  = v'^2/2 + ((n-2)^2/4) ((n-2)/(2n) v^{2n/(n-2)} - v^2/2).
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from ._accel import USE_NUMBA, njit
from .errors import ConvergenceError, DomainError, IntegrationError

OK, LOST_POSITIVITY, ESCAPED = 0, 1, 2
V_ESCAPE = 50.0


@dataclass(frozen=True)
class FowlerState:
    v: float
    vdot: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DomainError("the classical system needs an integer n >= 3")
        if not self.v > 0:
            raise DomainError("v must be positive")


def _coef(n):
    return (n - 2) ** 2 / 4


def potential(v, n):
    v = np.asarray(v, dtype=float)
    return _coef(n) * ((n - 2) / (2 * n) * v ** (2 * n / (n - 2)) - 0.5 * v * v)


def h1(state_or_v, vdot=None, n=None):
    """First integral H1; accepts a FowlerState or (v, vdot, n) arrays."""
    if isinstance(state_or_v, FowlerState):
        v, vdot, n = state_or_v.v, state_or_v.vdot, state_or_v.n
    else:
        v = state_or_v
    vdot = np.asarray(vdot, dtype=float)
    return 0.5 * vdot * vdot + potential(v, n)


def linear_period(n):
    """Period of the linearization at v = 1: 2 pi / sqrt(n - 2)."""
    return 2 * math.pi / math.sqrt(n - 2)


# ------------------------------------------------------------ RK4 kernels


@njit
def _accel_scalar(v, c, p):
    return c * (v - v ** p)


@njit
def _rk4_loop(v0, w0, c, p, dt, nsteps, vmax):
    m = v0.shape[0]
    vs = np.empty((m, nsteps + 1))
    ws = np.empty((m, nsteps + 1))
    status = np.zeros(m, dtype=np.int64)
    last = np.full(m, nsteps, dtype=np.int64)
    for j in range(m):
        v = v0[j]
        w = w0[j]
        vs[j, 0] = v
        ws[j, 0] = w
        for i in range(nsteps):
            k1v = w
            k1w = _accel_scalar(v, c, p)
            va = v + 0.5 * dt * k1v
            if va <= 0.0:
                status[j] = 1
                last[j] = i
                break
            k2v = w + 0.5 * dt * k1w
            k2w = _accel_scalar(va, c, p)
            vb = v + 0.5 * dt * k2v
            if vb <= 0.0:
                status[j] = 1
                last[j] = i
                break
            k3v = w + 0.5 * dt * k2w
            k3w = _accel_scalar(vb, c, p)
            vc = v + dt * k3v
            if vc <= 0.0:
                status[j] = 1
                last[j] = i
                break
            k4v = w + dt * k3w
            k4w = _accel_scalar(vc, c, p)
            v = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            w = w + dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)
            vs[j, i + 1] = v
            ws[j, i + 1] = w
            if v <= 0.0:
                status[j] = 1
                last[j] = i + 1
                break
            if v > vmax:
                status[j] = 2
                last[j] = i + 1
                break
    return vs, ws, status, last


def _rk4_vec(v0, w0, c, p, dt, nsteps, vmax):
    """Same scheme, vectorised across orbits; stopped orbits are frozen."""
    m = v0.shape[0]
    vs = np.empty((m, nsteps + 1))
    ws = np.empty((m, nsteps + 1))
    status = np.zeros(m, dtype=np.int64)
    last = np.full(m, nsteps, dtype=np.int64)
    v, w = v0.astype(float).copy(), w0.astype(float).copy()
    vs[:, 0], ws[:, 0] = v, w
    live = np.ones(m, dtype=bool)
    acc = lambda x: c * (x - np.abs(x) ** p)
    for i in range(nsteps):
        k1v, k1w = w, acc(v)
        va = v + 0.5 * dt * k1v
        k2v, k2w = w + 0.5 * dt * k1w, acc(va)
        vb = v + 0.5 * dt * k2v
        k3v, k3w = w + 0.5 * dt * k2w, acc(vb)
        vc = v + dt * k3v
        k4v, k4w = w + dt * k3w, acc(vc)
        nv = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        nw = w + dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)
        bad = live & ((va <= 0) | (vb <= 0) | (vc <= 0))
        status[bad], last[bad] = LOST_POSITIVITY, i
        live &= ~bad
        v = np.where(live, nv, v)
        w = np.where(live, nw, w)
        vs[:, i + 1], ws[:, i + 1] = v, w
        lost = live & (v <= 0)
        esc = live & (v > vmax)
        status[lost], status[esc] = LOST_POSITIVITY, ESCAPED
        last[lost | esc] = i + 1
        live &= ~(lost | esc)
        if not live.any():
            vs, ws = vs[:, :i + 2], ws[:, :i + 2]
            break
    return vs, ws, status, last


def _integrate_batch(v0, w0, n, dt, nsteps, vmax=V_ESCAPE, use_numba=None):
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    w0 = np.atleast_1d(np.asarray(w0, dtype=float))
    c, p = _coef(n), (n + 2) / (n - 2)
    numba = USE_NUMBA if use_numba is None else use_numba
    kernel = _rk4_loop if numba else _rk4_vec
    return kernel(v0, w0, c, p, float(dt), int(nsteps), float(vmax))


@dataclass(frozen=True)
class Orbit:
    n: int
    dt: float
    t: np.ndarray
    v: np.ndarray
    vdot: np.ndarray
    H: np.ndarray
    status: int = OK

    @property
    def drift(self):
        """max_t |H1(t) - H1(0)|."""
        return float(np.max(np.abs(self.H - self.H[0])))


def integrate_orbit(initial, t_end, dt, use_numba=None):
    """Classical fixed-step RK4 from ``initial``; raises if v leaves (0, inf)."""
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be positive")
    n = initial.n
    nsteps = int(round(t_end / dt))
    vs, ws, status, last = _integrate_batch(initial.v, initial.vdot, n, dt, nsteps,
                                            vmax=np.inf, use_numba=use_numba)
    if status[0] == LOST_POSITIVITY:
        raise IntegrationError(f"v lost positivity near t = {last[0] * dt:.6g}")
    v, w = vs[0], ws[0]
    t = dt * np.arange(v.size)
    return Orbit(n=n, dt=dt, t=t, v=v, vdot=w, H=h1(v, w, n))


def _hermite_root(t0, t1, f0, f1, d0, d1):
    """Root in [t0, t1] of the cubic Hermite interpolant of (f, f') data."""
    h = t1 - t0

    def cubic(t):
        s = (t - t0) / h
        h00 = 2 * s ** 3 - 3 * s ** 2 + 1
        h10 = s ** 3 - 2 * s ** 2 + s
        h01 = -2 * s ** 3 + 3 * s ** 2
        h11 = s ** 3 - s ** 2
        return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1
    return brentq(cubic, t0, t1, xtol=1e-15, rtol=1e-15)


def section_crossings(orbit, direction=-1):
    """Times where vdot crosses 0; direction -1 picks maxima of v, +1 minima."""
    w = orbit.vdot
    acc = (orbit.n - 2) ** 2 / 4 * (orbit.v - orbit.v ** ((orbit.n + 2) / (orbit.n - 2)))
    if direction < 0:
        idx = np.nonzero((w[:-1] > 0) & (w[1:] <= 0))[0]
    else:
        idx = np.nonzero((w[:-1] < 0) & (w[1:] >= 0))[0]
    return np.array([_hermite_root(orbit.t[i], orbit.t[i + 1], w[i], w[i + 1], acc[i], acc[i + 1])
                     for i in idx])


def orbit_period(initial, dt=1e-3, max_time=500.0, chunk=10.0, use_numba=None):
    """Period of a bounded orbit from two successive returns to the section vdot = 0.

    The orbit is integrated in chunks until two maxima of v have been seen.
    """
    H0 = float(h1(initial))
    if H0 >= 0:
        raise ConvergenceError("orbit is not inside the bounded component (H1 >= 0)")
    n = initial.n
    steps = max(int(round(chunk / dt)), 2)
    v0, w0, t0 = initial.v, initial.vdot, 0.0
    times = [0.0] if (initial.vdot == 0.0 and initial.v > 1.0) else []
    while len(times) < 2:
        if t0 >= max_time:
            raise ConvergenceError("fewer than two section crossings within max_time")
        vs, ws, status, last = _integrate_batch(v0, w0, n, dt, steps, use_numba=use_numba)
        if status[0] != OK:
            raise ConvergenceError("orbit escaped; it is not periodic")
        v, w = vs[0], ws[0]
        seg = Orbit(n=n, dt=dt, t=t0 + dt * np.arange(v.size), v=v, vdot=w, H=h1(v, w, n))
        times.extend(section_crossings(seg, direction=-1).tolist())
        v0, w0, t0 = v[-1], w[-1], seg.t[-1]
    return float(times[1] - times[0])


def turning_point(n, level, branch="outer"):
    """v > 0 with vdot = 0 on the level set H1 = level (level in (H1(1), 0))."""
    eq = float(potential(1.0, n))
    if not eq < level < 0:
        raise DomainError(f"level must lie in ({eq}, 0)")
    f = lambda v: float(potential(v, n)) - level
    vmax = (n / (n - 2)) ** ((n - 2) / 4)  # zero of the potential
    if branch == "outer":
        return brentq(f, 1.0, vmax, xtol=1e-15)
    return brentq(f, 1e-300, 1.0, xtol=1e-300, rtol=1e-15)


@dataclass(frozen=True)
class PortraitOrbit:
    level: float
    bounded: bool
    t: np.ndarray
    v: np.ndarray
    vdot: np.ndarray


def portrait(n, levels, t_end=20.0, dt=1e-3, use_numba=None):
    """Orbits through v = 1 on each H1 level.

    Levels below 0 start at the outer turning point and are periodic; levels
    at or above 0 start at v = 1 moving outward and leave every compact set.
    """
    eq = float(potential(1.0, n))
    v0, w0 = [], []
    for h in levels:
        if h <= eq:
            raise DomainError(f"level {h} is below the equilibrium level {eq}")
        if h < 0:
            v0.append(turning_point(n, h))
            w0.append(0.0)
        else:
            v0.append(1.0)
            w0.append(math.sqrt(2 * (h - eq)))
    nsteps = int(round(t_end / dt))
    vs, ws, status, last = _integrate_batch(np.array(v0), np.array(w0), n, dt, nsteps,
                                            use_numba=use_numba)
    out = []
    for j, h in enumerate(levels):
        k = int(last[j]) + 1
        out.append(PortraitOrbit(level=float(h), bounded=bool(status[j] == OK and h < 0),
                                 t=dt * np.arange(k), v=vs[j, :k], vdot=ws[j, :k]))
    return out
