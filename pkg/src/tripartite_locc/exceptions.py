"""Exception hierarchy. Everything derives from ``ValueError`` so callers that
only care about "bad input" can catch that."""

from __future__ import annotations


class LoccError(ValueError):
    """Base class for all package errors."""


class InvalidInputError(LoccError):
    """Malformed or out-of-contract input (non-normalized, wrong shape, ...)."""


class InvalidDensityMatrixError(InvalidInputError):
    pass


class InconsistentInvariantsError(LoccError):
    """An entanglement-phase ratio left [-1, 1] by more than rounding."""


class DegenerateFamilyError(LoccError):
    """A closed-form map is undefined for this degenerate coefficient family."""


class UnsupportedClassError(LoccError):
    """Operation is only defined for genuinely tripartite entangled states."""


class WrongClassError(LoccError):
    """Source or target is in the wrong SLOCC class for the requested protocol."""


class InvalidTargetError(InvalidInputError):
    """Target pattern and coefficients disagree."""


class InfeasibleTargetError(LoccError):
    """No protocol of the requested family reaches the target deterministically.

    ``constraint`` names the violated condition.
    """

    def __init__(self, message: str, constraint: str = "", violated_quantity: float | None = None):
        super().__init__(message)
        self.constraint = constraint
        self.violated_quantity = violated_quantity


class MonotonicityError(InfeasibleTargetError):
    """A W-type step or chain would have to increase a protected coefficient."""

    def __init__(self, message: str, indices: tuple[int, ...] = ()):
        super().__init__(message, constraint="monotonicity")
        self.indices = tuple(indices)


class DegenerateStepError(LoccError):
    pass
