"""Exception hierarchy shared by all modules.

The CLI maps each family onto an exit code: contract/domain problems exit 1,
bad input files exit 2 and broken internal invariants exit 3.
"""

from __future__ import annotations


class NewsvolError(Exception):
    """Base class for every error raised on purpose by this package."""

    exit_code = 1


class ContractError(NewsvolError, ValueError):
    """A caller broke an operation's precondition."""


class DomainError(NewsvolError, ValueError):
    """A numeric argument lies outside the function's domain."""


class CoverageError(NewsvolError):
    """A price window does not reach far enough to compute a label."""


class DegenerateInputError(NewsvolError, ValueError):
    """Input carries no information to estimate from (e.g. a constant series)."""


class ConvergenceError(NewsvolError):
    """An optimizer hit its iteration cap.

    ``best`` holds the best parameters found so far and ``loglik`` their
    log-likelihood, so callers can decide whether to use them anyway.
    """

    def __init__(self, message: str, best=None, loglik: float | None = None):
        super().__init__(message)
        self.best = best
        self.loglik = loglik


class SchemaError(NewsvolError):
    """An input file lacks a required column or has an unreadable layout."""

    exit_code = 2

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


class ChecksumMismatch(NewsvolError):
    """A model was trained against a different vocabulary than the features."""

    exit_code = 2


class InvariantViolation(NewsvolError):
    """Internal consistency check failed; indicates a bug, not bad input."""

    exit_code = 3
