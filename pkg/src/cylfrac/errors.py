class CylfracError(Exception):
    """Base class for errors raised by this package."""


class PoleError(CylfracError, ValueError):
    """Argument sits on a pole of a Gamma-type function."""


class ConvergenceError(CylfracError, RuntimeError):
    """A series, root finder or extrapolation failed to converge."""


class DomainError(CylfracError, ValueError):
    """Parameters outside the admissible range of an operation."""


class IntegrationError(CylfracError, RuntimeError):
    """ODE integration failed (step failure or loss of positivity)."""
