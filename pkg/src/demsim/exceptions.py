"""Exception types raised by demsim."""


class DemError(Exception):
    """Base class for all demsim errors."""


class DomainError(DemError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class QuadratureError(DemError, RuntimeError):
    """Numerical quadrature did not reach the requested tolerance.

    The achieved error estimate is kept on ``abserr``.
    """

    def __init__(self, message, abserr):
        super().__init__(message)
        self.abserr = abserr


class EigenConvergenceError(DemError, RuntimeError):
    """The iterative eigensolver hit its iteration cap."""


class OracleStepError(DemError, RuntimeError):
    """ODE step control could not keep unitarity drift below the hard limit."""


class FitError(DemError, ValueError):
    """Data handed to a fitting routine violates its preconditions."""


class ValidityWarning(UserWarning):
    """Results were requested beyond the validity horizon of the finite bath."""
