"""Exception types shared across the package.

Validation problems derive from ``ValidationError`` and budget exhaustion
from ``BudgetExceeded`` so the command line can map them to exit codes.
"""
from __future__ import annotations

from typing import Any


class ValidationError(ValueError):
    """Input does not satisfy a documented precondition."""


class DegenerateTriple(ValidationError):
    pass


class DegenerateTuple(ValidationError):
    pass


class NotHyperbolic(ValidationError):
    pass


class OrientationMismatch(ValidationError):
    """Two triples with opposite cyclic order cannot be related in PSL(2,R)."""


class NonPositiveAngle(ValidationError):
    pass


class DegenerateRectangle(ValidationError):
    pass


class ChartFailure(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class OutsideDomain(ValidationError):
    pass


class BoundaryCase(ValidationError):
    """Parameters sit on the boundary of the domain; use the boundary constructor."""


class NotBoundary(ValidationError):
    pass


class OutOfInterval(ValidationError):
    pass


class DuplicatePoints(ValidationError):
    pass


class InconsistentPairing(ValidationError):
    pass


class NonStandardQuadrants(ValidationError):
    pass


class EllipticHolonomy(ValidationError):
    pass


class NotFixingBase(ValidationError):
    pass


class IncompatibleCircle(ValidationError):
    pass


class GaussBonnetViolation(ValidationError):
    pass


class NoReturn(RuntimeError):
    """A traced leaf never came back to the section within budget."""


class NoRoot(RuntimeError):
    pass


class VerificationFailed(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    """Iteration budget ran out; ``best`` holds the best result found so far."""

    def __init__(self, message: str, best: Any = None):
        super().__init__(message)
        self.best = best


class PlateauWarning(UserWarning):
    """A bisection ended on a mode-locked plateau instead of the target."""
