"""Exception types shared by every module.

Numerical code in this package never returns NaN as a value; it raises one
of these instead so callers can tell "outside the validated domain" apart
from a genuine zero.
"""


class RQIError(Exception):
    """Base class for all package errors."""


class DomainError(RQIError, ValueError):
    """Input lies outside the validated domain of a function."""


class SingularInputError(DomainError):
    """Input sits on a singularity (pole, coincidence, light cone)."""


class ContractError(RQIError, ValueError):
    """A documented precondition on the arguments was violated."""


class UnsupportedConfigurationError(RQIError):
    """The requested combination of parameters has no implementation."""


class NumericalFailure(RQIError, RuntimeError):
    """An iterative or quadrature routine did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PartitionError(ContractError):
    """Mode supports of the two regions overlap."""


class LinearDependenceError(RQIError, ValueError):
    """A set of modes is degenerate under the symplectic form."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PerturbativeRangeError(ContractError):
    """A truncated perturbative state is not positive to the required tolerance."""
