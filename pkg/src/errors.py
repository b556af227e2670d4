"""Exception hierarchy shared by every ballarea package."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.minimizer.solver import SolveStats


class BallAreaError(Exception):
    """Base class for all errors raised by ballarea."""


class DomainError(BallAreaError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """The evaluation point is inside the guard radius around the pole y."""


class QuadratureError(BallAreaError):
    """Adaptive quadrature could not reach the requested tolerance."""


class InvariantViolationError(BallAreaError):
    """A surface or frame invariant does not hold."""


class PreconditionError(BallAreaError):
    """A verification check refused its input."""

    def __init__(self, message: str, *, offending: object | None = None) -> None:
        """Store the offending value next to the message."""
        super().__init__(message)
        self.offending = offending


class SolverStallError(BallAreaError):
    """The line search failed; partial statistics are attached."""

    def __init__(self, message: str, stats: SolveStats) -> None:
        """Keep the statistics of the stalled run."""
        super().__init__(message)
        self.stats = stats


class MeshFormatError(BallAreaError, ValueError):
    """A mesh file could not be parsed."""


class ConfigError(BallAreaError, ValueError):
    """A run configuration is malformed."""

    def __init__(self, message: str, *, field: str | None = None) -> None:
        """Remember which configuration field was rejected."""
        super().__init__(message)
        self.field = field
