"""Exception and warning types raised by the package."""

from __future__ import annotations


class InvalidParameterError(ValueError):
    """A parameter lies outside the admissible range of an operation."""


class StructureError(ValueError):
    """Operands have incompatible shapes or structure."""


class EvaluationError(FloatingPointError):
    """A function sample at a quadrature point was not finite."""

    def __init__(self, message: str, location: tuple[float, ...] | None = None):
        super().__init__(message)
        self.location = location


class SolverError(RuntimeError):
    """The linear system could not be factorised.

    Attributes
    ----------
    pivot : int or None
        Global row index of the offending pivot, if known.
    """

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class MemoryCeilingError(MemoryError):
    """Estimated memory of a requested run exceeds the configured ceiling."""


class AccuracyWarning(UserWarning):
    """A solve finished but its relative residual missed the tolerance."""
