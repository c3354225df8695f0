"""Conformal fractional Laplacian on the cylinder R x S^{n-1}: symbols, extension
fields, conserved quantities and linearized periods."""
from ._accel import backend
from .errors import ConvergenceError, CylfracError, DomainError, IntegrationError, PoleError
from .symbol import CylinderParams, scattering_constants, theta, theta_integer, yamabe_constant

__version__ = "0.1.0"

__all__ = [
    "CylinderParams",
    "ConvergenceError",
    "CylfracError",
    "DomainError",
    "IntegrationError",
    "PoleError",
    "backend",
    "scattering_constants",
    "theta",
    "theta_integer",
    "yamabe_constant",
]
