"""Periods of the linearized equation around the constant solution.

Writing the perturbation as e^{i sqrt(lambda) t}, the linearized boundary
equation reduces to F(beta) = 1 with beta = sqrt(lambda)/2 and

    F(beta) = Theta^k(2 beta) / (c_{n,gamma} (n + 2 gamma)/(n - 2 gamma)).
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import specfun
from .errors import ConvergenceError
from .geometry import X_function
from .symbol import CylinderParams, theta, yamabe_constant

ROOT_TOL = 1e-12
ABSENT_TOL = 1e-14
MAX_DOUBLINGS = 60
MAX_BISECTIONS = 500


def _alphas(params):
    base = 0.5 + params.nu / 2
    return base + params.gamma / 2, base - params.gamma / 2


def _normaliser(n, gamma):
    return (n + 2 * gamma) / (n - 2 * gamma) * yamabe_constant(n, gamma)


def F_beta(n, gamma, k, beta):
    params = CylinderParams(n, gamma, k)
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0):
        raise ValueError("beta must be non-negative")
    out = theta(params, 2 * beta) / _normaliser(n, gamma)
    return float(out) if np.ndim(out) == 0 else out


def log_F_derivative(n, gamma, k, beta, method="digamma", terms=100_000):
    """d/dbeta log F.

    'digamma': 2 Im[psi(a~ + i beta) - psi(a + i beta)].
    'series':  2 gamma beta sum_m (2m + 1 + nu) / (((m+a)^2 + beta^2)((m+a~)^2 + beta^2)).
    """
    params = CylinderParams(n, gamma, k)
    a, at = _alphas(params)
    beta = np.asarray(beta, dtype=float)
    if method == "digamma":
        out = 2 * np.imag(specfun.digamma(at + 1j * beta) - specfun.digamma(a + 1j * beta))
    elif method == "series":
        m = np.arange(terms, dtype=float)
        b2 = beta[..., None] ** 2
        summand = (2 * m + 1 + params.nu) / (((m + a) ** 2 + b2) * ((m + at) ** 2 + b2))
        out = 2 * gamma * beta * summand.sum(axis=-1)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LinearizationResult:
    n: int
    gamma: float
    k: int
    F0: float
    lambda_: float | None = None
    period: float | None = None
    bracket: tuple = (math.nan, math.nan)
    residual: float = math.nan
    iterations: int = 0
    note: str = ""

    @property
    def present(self):
        return self.lambda_ is not None


def solve_lambda(n, gamma, k=0):
    """Positive root lambda of F(sqrt(lambda)/2) = 1, found by bisection."""
    f = lambda b: F_beta(n, gamma, k, b) - 1.0
    f0 = f(0.0)
    F0 = f0 + 1.0
    if f0 >= -ABSENT_TOL:
        note = "F(0) = 1: lambda = 0 excluded" if abs(f0) <= ABSENT_TOL else "F(0) > 1: no positive root"
        return LinearizationResult(n, gamma, k, F0, note=note)
    lo, hi = 0.0, 1.0
    for _ in range(MAX_DOUBLINGS):
        if f(hi) > 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise ConvergenceError("could not bracket the root of F(beta) = 1")
    bracket = (lo, hi)
    for it in range(1, MAX_BISECTIONS + 1):
        mid = 0.5 * (lo + hi)
        val = f(mid)
        if abs(val) <= ROOT_TOL or mid in (lo, hi):
            break
        if val > 0:
            hi = mid
        else:
            lo = mid
    else:
        raise ConvergenceError("bisection iteration limit reached")
    if abs(val) > ROOT_TOL:
        raise ConvergenceError(f"bisection stalled at |F-1| = {abs(val):.3e}")
    lam = (2 * mid) ** 2
    return LinearizationResult(n, gamma, k, F0, lambda_=lam, period=2 * math.pi / math.sqrt(lam),
                               bracket=bracket, residual=val, iterations=it)


def f1_closed_form(n, gamma):
    return (n - 2 * gamma) / (n + 2 * gamma) / X_function(n, gamma) ** 2


@dataclass
class ScanReport:
    rows: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)


def conjecture_scan(n_values, gamma_values, k_max=3):
    """Tabulate f_k = F(0) and record (never assert) the three observed trends."""
    n_values = list(n_values)
    gamma_values = sorted(gamma_values)
    if not n_values or not gamma_values:
        raise ValueError("empty scan grid")
    report = ScanReport()
    f1_by_n = {}
    for n in n_values:
        for g in gamma_values:
            if not 0 < g < min(1.0, n / 2):
                continue
            fk = [F_beta(n, g, k, 0.0) for k in range(k_max + 1)]
            increasing = all(b > a for a, b in zip(fk, fk[1:]))
            row = {"n": n, "gamma": g}
            row.update({f"f{k}": v for k, v in enumerate(fk)})
            row["increasing_in_k"] = increasing
            row["f1_gt_1"] = k_max >= 1 and fk[1] > 1
            report.rows.append(row)
            if k_max >= 1:
                f1_by_n.setdefault(n, []).append((g, fk[1]))
            if not increasing:
                report.counterexamples.append({**row, "flag": "f_k not increasing in k"})
            if k_max >= 1 and not fk[1] > 1:
                report.counterexamples.append({**row, "flag": "f_1 <= 1"})
    for n, seq in f1_by_n.items():
        for (g0, a), (g1, b) in zip(seq, seq[1:]):
            if not b > a:
                report.counterexamples.append(
                    {"n": n, "gamma": g1, "f1": b, "flag": f"f_1 not increasing between gamma={g0} and {g1}"})
    kinds = [c["flag"] for c in report.counterexamples]
    report.flags = {
        "f_k_increasing_in_k": not any("increasing in k" in f for f in kinds),
        "f1_gt_1": not any(f == "f_1 <= 1" for f in kinds),
        "f1_increasing_in_gamma": not any(f.startswith("f_1 not increasing") for f in kinds),
    }
    return report
