"""Exception taxonomy shared across the toolkit."""


class SpeccertError(Exception):
    """Base class for all toolkit errors."""


class StructuralError(SpeccertError, ValueError):
    """Malformed input: wrong shape, dimension mismatch, broken invariant."""


class PreconditionError(SpeccertError, ValueError):
    """An operation was called outside its documented preconditions."""


class NumericalError(SpeccertError, RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class RefinementNeededError(SpeccertError, ValueError):
    """Path discretization too coarse for the requested operation."""


class GeometryError(SpeccertError, ValueError):
    """Requested geometry does not fit inside the control box."""


class BudgetError(SpeccertError, RuntimeError):
    """A work budget (steps, samples) was exhausted."""
