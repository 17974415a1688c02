"""Exception types shared across the package."""


class ThetaGuardError(Exception):
    """Base class for all package errors."""


class GeometryError(ThetaGuardError, ValueError):
    """Invalid geometric input (coincident points, out-of-range angles, ...)."""


class EmptyGuardSetError(GeometryError):
    def __init__(self, message: str = "empty guard set"):
        super().__init__(message)


class DegeneracyError(ThetaGuardError):
    """Numerical near-degeneracy beyond what the predicates can resolve.

    ``where`` carries the offending coordinates when known.
    """

    def __init__(self, message: str, where=None):
        super().__init__(message if where is None else f"{message} at {where}")
        self.where = where


class PreconditionError(ThetaGuardError, ValueError):
    """A documented precondition of an operation does not hold."""


class VerificationError(ThetaGuardError):
    """Two independent computations that must agree did not."""
