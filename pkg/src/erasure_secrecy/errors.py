"""Exception types raised across the package."""

from __future__ import annotations


class SecrecyError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(SecrecyError, ValueError):
    pass


class Singular(SecrecyError, ArithmeticError):
    """Raised when a square GF(2) matrix has no inverse."""


class AttemptBudgetExceeded(SecrecyError, RuntimeError):
    pass


class RankDeficient(SecrecyError, ValueError):
    pass


class DegenerateMarginal(SecrecyError, ValueError):
    """An erasure probability of exactly 0 or 1 leaves the correlation undefined."""


class InfeasibleCorrelation(SecrecyError, ValueError):
    pass


class InconsistentInput(SecrecyError, ValueError):
    """Known bits violate a parity check; the data is corrupted, not erased."""


class PatternNotFound(SecrecyError, RuntimeError):
    pass


class InvalidPattern(SecrecyError, RuntimeError):
    pass


class IncompleteReception(SecrecyError, RuntimeError):
    pass


class RetransmissionCapExceeded(SecrecyError, RuntimeError):
    """A packet needed more transmissions than allowed.

    ``partial`` carries the trial state reached before the cap was hit.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
