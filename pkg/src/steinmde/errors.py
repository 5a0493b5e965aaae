"""Semantic exception hierarchy for the package.

Everything raised on purpose derives from ``EstimationError`` so that
batch drivers (the Monte Carlo engine, the CLI) can distinguish a
recorded per-replication failure from a genuine bug.
"""


class EstimationError(Exception):
    """Base class for all errors raised deliberately by this package."""


class DomainError(EstimationError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class UnsupportedFamilyError(EstimationError):
    """The requested operation is not available for this family."""


class DegenerateSampleError(EstimationError):
    """The sample admits no well-defined estimate (e.g. total ties)."""


class SampleTooSmallError(EstimationError):
    """The estimator needs more observations than the sample provides."""


class SingularSystemError(EstimationError):
    """The normal equations of a closed-form fit are singular."""


class SingularMomentsError(EstimationError):
    """The moment system of the score-matching fit is singular."""


class QuadratureError(EstimationError):
    """Adaptive quadrature failed to reach the requested tolerance.

    ``achieved`` carries the error estimate that was actually attained.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class NoSignChangeError(EstimationError):
    """Root bracket endpoints have equal signs and Newton stalled."""


class InvalidBoundsError(EstimationError, ValueError):
    """Box constraints are inconsistent or exclude the start point."""


class ConfigError(EstimationError):
    """An experiment configuration file or CLI argument is invalid."""


class DataFileError(EstimationError):
    """A data file contains a malformed or nonpositive observation."""
