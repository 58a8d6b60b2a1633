"""Shared exception types.

Every error that signals "this sample point is bad, pick another one"
derives from ResampleNeeded so drivers can catch one type.
"""


class UnitonflowError(Exception):
    """Base class for package errors."""


class ResampleNeeded(UnitonflowError):
    """The computation is valid away from a discrete set; this point is in it."""


class PoleAtPoint(ResampleNeeded):
    """A rational function was evaluated too close to a pole."""

    def __init__(self, z: complex, message: str = ""):
        self.z = z
        super().__init__(message or f"pole (or near-pole) at z={z}")


class RankAmbiguous(ResampleNeeded):
    """Numerical rank of a span is ambiguous at this point (residual in the tolerance band)."""

    def __init__(self, step: int, residuals=()):
        self.step = step
        self.residuals = tuple(residuals)
        super().__init__(f"ambiguous rank at chain step {step}: borderline residuals {list(residuals)}")


class DimensionMismatch(UnitonflowError, ValueError):
    """Operands have incompatible shapes."""


class NotEchelon(UnitonflowError, ValueError):
    """An operation required an echelon array and the input is not one."""


class AlternationViolation(UnitonflowError, ValueError):
    """A constrained array does not alternate between the fixed subspace and its complement."""
