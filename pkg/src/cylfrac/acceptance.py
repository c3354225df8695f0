"""The thirteen acceptance checks, runnable from the CLI and from pytest.

Each check returns a ``CheckResult``; none of them raises on a numerical
miss.  Runtime budgets are part of the verdict.
"""
from dataclasses import dataclass
import math
import time

import numpy as np

from . import extension, fowler, geometry, linearization, specfun, symbol
from .symbol import CylinderParams


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number:2d} {self.title}: {self.detail} ({self.seconds:.2f}s / {self.budget:g}s)"


def _timed(number, title, budget):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            within = dt < budget
            if not within:
                detail += "; over time budget"
            return CheckResult(number, title, bool(ok and within), detail, dt, budget)
        run.number = number
        run.title = title
        return run
    return wrap


@_timed(1, "classical-limit curvature constant", 1.0)
def check_classical_constant():
    worst = max(abs(symbol.yamabe_constant(n, 1 - 1e-6) / ((n - 2) ** 2 / 4) - 1) for n in range(3, 9))
    return worst <= 1e-4, f"max rel err {worst:.3e} (tol 1e-4)"


@_timed(2, "symbol at zero equals curvature", 1.0)
def check_symbol_at_zero():
    worst = 0.0
    for n in range(2, 22):
        for g in 0.025 + 0.05 * np.arange(20):
            th = symbol.theta(CylinderParams(n, float(g)), 0.0)
            worst = max(worst, abs(th / symbol.yamabe_constant(n, float(g)) - 1))
    return worst <= 1e-12, f"max rel err {worst:.3e} on 20x20 grid (tol 1e-12)"


@_timed(3, "integer reduction at |gamma-1| = 1e-6", 5.0)
def check_integer_reduction():
    xi = np.linspace(0.0, 10.0, 101)
    worst = 0.0
    for n in (3, 4, 5):
        for k in (0, 1, 2):
            exact = xi ** 2 + (n - 2) ** 2 / 4 + k * (k + n - 2)
            for g in (1 - 1e-6, 1 + 1e-6):
                if not g < n / 2:
                    continue
                worst = max(worst, np.max(np.abs(symbol.theta(CylinderParams(n, g, k), xi) - exact)))
    return worst <= 1e-4, f"max abs diff {worst:.3e} (tol 1e-4)"


@_timed(4, "mode-ODE oracle reproduces the symbol", 60.0)
def check_oracle():
    worst = 0.0
    for n in (3, 4, 5):
        for k in (0, 1, 2):
            for xi in (0.0, 1.0, 2.0):
                for g in (0.3, 0.5, 0.7):
                    p = CylinderParams(n, g, k)
                    prof = extension.solve_mode_ode(p, xi)
                    worst = max(worst, abs(prof.symbol / symbol.theta(p, xi) - 1))
    return worst <= 1e-6, f"max rel err {worst:.3e} over 81 cases (tol 1e-6)"


@_timed(5, "linearized period limit", 5.0)
def check_period_limit():
    parts, ok = [], True
    for n in (3, 4, 5):
        r = linearization.solve_lambda(n, 0.999, 0)
        good = (r.present and abs(r.lambda_ - (n - 2)) <= 0.05
                and abs(r.period - 2 * math.pi / math.sqrt(r.lambda_)) <= 1e-12 * r.period)
        ok &= good
        parts.append(f"n={n}: lambda={r.lambda_:.6f}" if r.present else f"n={n}: absent")
    return ok, ", ".join(parts)


@_timed(6, "classical orbit period", 30.0)
def check_fowler_period():
    errs = []
    for n in (3, 4):
        L = fowler.orbit_period(fowler.FowlerState(1 + 1e-3, 0.0, n), dt=1e-3)
        errs.append(abs(L - fowler.linear_period(n)))
    return max(errs) <= 1e-3, "errs " + ", ".join(f"{e:.2e}" for e in errs) + " (tol 1e-3)"


HAMILTONIAN_TIMES = (0.0, 0.5, 1.0, 2.0, 4.0)
HAMILTONIAN_CASES = ((3, 0.5), (4, 0.3), (4, 0.7))
BUBBLE_PERIOD = 40.0
FINE_MODES = 2048
REFINE_MODES = (64, 128)


def bubble_field(n, g, N, L=BUBBLE_PERIOD):
    t = extension.periodic_grid(L, N)
    return extension.extension_field(geometry.bubble_profile(t, n, g), L, n, g)


def hamiltonian_spread(field, kind="H"):
    fn = extension.hamiltonian if kind == "H" else extension.hamiltonian_star
    vals = [fn(field, t) for t in HAMILTONIAN_TIMES]
    hs = np.array([v.H for v in vals])
    return float((hs.max() - hs.min()) / max(v.scale for v in vals))


@_timed(7, "Hamiltonian constancy (H and H*)", 120.0)
def check_hamiltonian():
    ok, parts = True, []
    for n, g in HAMILTONIAN_CASES:
        fine = bubble_field(n, g, FINE_MODES)
        coarse, finer = (bubble_field(n, g, N) for N in REFINE_MODES)
        for kind in ("H", "H*"):
            s = hamiltonian_spread(fine, kind)
            s0, s1 = hamiltonian_spread(coarse, kind), hamiltonian_spread(finer, kind)
            ratio = s0 / s1 if s1 > 0 else math.inf
            ok &= s <= 1e-4 and ratio >= 2
            parts.append(f"({n},{g}) {kind}: spread {s:.1e}, refine x{ratio:.1e}")
    return ok, "; ".join(parts)


@_timed(8, "Neumann data of the bubble", 60.0)
def check_neumann():
    worst = 0.0
    ts = np.array([0.0, 1.0, 2.0])
    for n, g in HAMILTONIAN_CASES:
        f = bubble_field(n, g, FINE_MODES)
        T = extension.neumann_trace(f, ts)
        target = symbol.yamabe_constant(n, g) * geometry.bubble_profile(ts, n, g) ** ((n + 2 * g) / (n - 2 * g))
        worst = max(worst, float(np.max(np.abs(T / target - 1))))
    return worst <= 1e-4, f"max rel err {worst:.3e} (tol 1e-4)"


@_timed(9, "bubble constant", 1.0)
def check_bubble():
    cmin = min(geometry.bubble_constant(n, g) for n in range(2, 11)
               for g in np.arange(1, 10) / 10 if g < n / 2)
    err = abs(geometry.bubble_constant(4, 1 - 1e-6) - math.sqrt(2))
    return cmin > 1 and err <= 1e-4, f"min C {cmin:.6f}, |C(4,1-1e-6) - sqrt2| = {err:.2e}"


@_timed(10, "monotonicity of X and F", 10.0)
def check_monotonicity():
    ns = np.linspace(3.0, 10.0, 50)
    fr = np.linspace(0.02, 0.98, 50)
    N, FR = np.meshgrid(ns, fr, indexing="ij")
    G = FR * np.minimum(1.0, N / 2)
    dn, dg = geometry.X_partials(N, G)
    sn, sg = geometry.X_partials(N, G, method="series")
    agree = max(np.max(np.abs(dn - sn)), np.max(np.abs(dg - sg)))
    x_ok = bool(np.all(dn > 0) and np.all(dg < 0) and agree <= 1e-8)
    rng = np.random.default_rng(20240917)
    bad, gap = 0, 0.0
    for _ in range(1000):
        n = int(rng.integers(3, 11))
        g = float(rng.uniform(0.05, 0.95))
        k = int(rng.integers(0, 4))
        b = float(rng.uniform(0.01, 10.0))
        d = linearization.log_F_derivative(n, g, k, b, method="series")
        gap = max(gap, abs(d - linearization.log_F_derivative(n, g, k, b)) / d)
        inc = linearization.F_beta(n, g, k, b * 1.01) > linearization.F_beta(n, g, k, b)
        bad += not (d > 0 and inc)
    return x_ok and bad == 0, (f"X partials signs ok={x_ok}, series/digamma {agree:.1e}; "
                               f"F violations {bad}/1000, (log F)' series vs digamma rel {gap:.1e}")


@_timed(11, "rho* expansion near the boundary", 10.0)
def check_rho_star():
    ok, parts = True, []
    rho = np.geomspace(1e-4, 1e-2, 40)
    for n, g in ((3, 0.5), (5, 0.7)):
        df = geometry.special_defining_function(rho, n, g)
        y = df.rho_star / rho - 1
        slope, _ = np.polyfit(np.log(rho), np.log(np.abs(y)), 1)
        # model rho*/rho - 1 = C rho^{2 gamma} + D rho^2, the form of the expansion
        design = np.column_stack([rho ** (2 * g), rho ** 2])
        coef = float(np.linalg.lstsq(design, y, rcond=None)[0][0])
        single = float(np.linalg.lstsq(design[:, :1], y, rcond=None)[0][0])
        pred = geometry.expansion_coefficient(n, g)
        rel = abs(coef / pred - 1)
        ok &= abs(slope - 2 * g) <= 0.05 and rel <= 0.05
        parts.append(f"({n},{g}) slope {slope:.4f} vs {2 * g}, coef rel err {rel:.2%} "
                     f"(one-term fit {abs(single / pred - 1):.2%})")
    return ok, "; ".join(parts)


def _rand_complex(rng, size, re=(-5, 5), im=(-5, 5)):
    return rng.uniform(*re, size) + 1j * rng.uniform(*im, size)


@_timed(12, "special-function identities", 10.0)
def check_specfun():
    rng = np.random.default_rng(12)
    z = _rand_complex(rng, 100)
    z = z[np.abs(z - np.round(z.real)) > 1e-3]
    rec = np.max(np.abs(specfun.gamma(z + 1) - z * specfun.gamma(z)) / np.abs(specfun.gamma(z + 1)))
    zd = _rand_complex(rng, 100, re=(0.2, 5))
    lhs = specfun.gamma(zd) * specfun.gamma(zd + 0.5)
    rhs = 2 ** (1 - 2 * zd) * math.sqrt(math.pi) * specfun.gamma(2 * zd)
    dup = np.max(np.abs(lhs - rhs) / np.abs(rhs))
    g1, g2 = specfun.gamma(np.conj(z)), np.conj(specfun.gamma(z))
    conj = np.max(np.abs(g1 - g2) / (np.spacing(np.abs(g2)) * 2))
    conn = 0.0
    for _ in range(100):
        a, b = rng.uniform(0.1, 2.0, 2)
        c = a + b + rng.choice([-1, 1]) * rng.uniform(0.1, 0.9)
        if c <= 0:
            c += 2.0
        conn = max(conn, specfun.hyp2f1_connection_residual(a, b, c, rng.uniform(0.5, 0.7)))
    errs = []
    for z1 in (1e2, 2e2, 4e2, 8e2, 1.6e3, 3.2e3, 6.4e3, 1e4):
        errs.append(abs((specfun.beta(z1, 1.5) * z1 ** 1.5 / specfun.gamma(1.5)).real - 1))
    beta_mono = all(b < a for a, b in zip(errs, errs[1:]))
    zero = max(abs(specfun.hyp2f1(*rng.uniform(-3, 3, 2), rng.uniform(0.5, 3), 0.0) - 1) for _ in range(100))
    sym = 0.0
    for _ in range(100):
        a, b = rng.uniform(-2, 2, 2)
        c, x = rng.uniform(0.5, 3), rng.uniform(-0.9, 0.9)
        sym = max(sym, abs(specfun.hyp2f1(a, b, c, x) - specfun.hyp2f1(b, a, c, x)))
    ok = rec <= 1e-12 and dup <= 1e-11 and conj <= 1 and conn <= 1e-10 and beta_mono and zero == 0 and sym <= 1e-14
    detail = (f"recurrence {rec:.1e}, duplication {dup:.1e}, conjugation {conj:.1f} ulp, "
              f"connection {conn:.1e}, beta monotone {beta_mono}, F(;0)-1 {zero:.0e}, symmetry {sym:.0e}")
    return ok, detail


@_timed(13, "f_k conjecture scan (report)", 5.0)
def check_conjecture_scan():
    report = linearization.conjecture_scan(range(3, 11), np.linspace(0.02, 0.98, 50), k_max=3)
    flags = ", ".join(f"{k}={v}" for k, v in report.flags.items())
    return len(report.rows) > 0, f"{len(report.rows)} rows, {len(report.counterexamples)} flagged; {flags}"


CHECKS = (check_classical_constant, check_symbol_at_zero, check_integer_reduction, check_oracle,
          check_period_limit, check_fowler_period, check_hamiltonian, check_neumann, check_bubble,
          check_monotonicity, check_rho_star, check_specfun, check_conjecture_scan)


def run_all(selected=None):
    return [check() for check in CHECKS if selected is None or check.number in selected]
