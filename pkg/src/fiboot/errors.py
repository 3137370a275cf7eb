"""Exception types shared across the package.

Configuration-style problems (bad parameters, malformed inputs) derive from
``ValueError`` so they map onto CLI exit code 2; numerical failures derive
from ``FibootNumericalError`` and map onto exit code 3.
"""


class FibootError(Exception):
    """Base class for package errors."""


class DomainError(FibootError, ValueError):
    """A parameter is outside the mathematical domain of the operation."""


class LagError(DomainError):
    """Requested lag is out of range for the series."""


class InsufficientLagsError(DomainError):
    """An autocovariance sequence is too short for the requested operation."""


class OrderMismatchError(DomainError):
    """Two fitted objects have incompatible autoregressive orders."""


class AdmissibilityError(DomainError):
    """Pre-filter exponent lies outside the admissible open window."""


class ValidityError(DomainError):
    """Edgeworth expansion requested outside its region of validity."""


class ConfigError(FibootError, ValueError):
    """Malformed experiment configuration or input file."""


class FibootNumericalError(FibootError, RuntimeError):
    """Base class for runtime numerical failures."""


class ConvergenceError(FibootNumericalError):
    """An iterative evaluation failed to reach its tolerance."""


class SingularityError(FibootNumericalError):
    """A covariance structure is not positive definite."""


class DegenerateVarianceError(FibootNumericalError):
    """A variance that must be positive collapsed to zero."""


class SingularDesignError(FibootNumericalError):
    """A least-squares design matrix is rank deficient."""


class ReplicationError(FibootNumericalError):
    """A Monte Carlo replication failed; carries the index and stream key."""

    def __init__(self, replication: int, stream_key: tuple, cause: BaseException):
        self.replication = replication
        self.stream_key = stream_key
        self.cause = cause
        super().__init__(
            f"replication {replication} (stream key {stream_key}) failed: {cause!r}"
        )
