"""Composite radial quadrature on (0, 2).

Integrands near rho = 0 mix several non-integer powers (rho^a, rho^{2 gamma - 1},
...), so the short interval (0, delta) uses a tanh-sinh rule, which is exact
to rounding for any integrable algebraic endpoint behaviour.  The rest of the
interval is smooth and uses Gauss-Legendre.  A plain Gauss-Jacobi rule with
weight rho^a is kept for comparison and for integrands that are exactly
rho^a times a polynomial.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, roots_jacobi, roots_legendre

DELTA = 0.1
RHO_MAX = 2.0
NODE_FLOOR = 1e-306


@dataclass(frozen=True)
class Rule:
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values, axis=-1):
        return np.tensordot(np.moveaxis(values, axis, -1), self.weights, axes=1)

    def __len__(self):
        return self.nodes.size


def gauss_legendre(lo, hi, npts):
    x, w = roots_legendre(npts)
    half = (hi - lo) / 2
    return Rule(lo + half * (x + 1), half * w)


def gauss_jacobi(delta, exponent, npts):
    """Nodes/weights for int_0^delta rho^exponent f(rho) d rho (weight not included in f)."""
    if exponent <= -1:
        raise ValueError("weight exponent must exceed -1")
    x, w = roots_jacobi(npts, 0.0, exponent)
    return Rule(delta * (x + 1) / 2, (delta / 2) ** (1 + exponent) * w)


def tanh_sinh(delta, h, kmin=-3.5, kmax=6.3):
    """Tanh-sinh rule on (0, delta), clustered at 0.

    rho = delta / (1 + exp(2 s)), s = (pi/2) sinh(k h).  The window is
    asymmetric because only the left end carries singular behaviour.
    """
    k = np.arange(np.ceil(kmin / h), np.floor(kmax / h) + 1) * h
    s = np.pi / 2 * np.sinh(k)
    nodes = delta * expit(-2 * s)
    # 1/cosh(s)^2 = 4 expit(2s) expit(-2s), without overflow
    weights = h * delta * np.pi * np.cosh(k) * expit(2 * s) * expit(-2 * s)
    # stop just above the smallest normal double; the tail below is what limits gamma -> 1
    keep = (nodes > NODE_FLOOR) & (weights > NODE_FLOOR)
    return Rule(nodes[keep], weights[keep])


def composite(delta=DELTA, h=0.1, n_far=60):
    near = tanh_sinh(delta, h)
    far = gauss_legendre(delta, RHO_MAX, n_far)
    return Rule(np.concatenate([near.nodes, far.nodes]), np.concatenate([near.weights, far.weights]))
