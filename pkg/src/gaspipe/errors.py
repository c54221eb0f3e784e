"""Exception types raised across the package."""


class GasPipeError(Exception):
    """Base class for all package errors."""


class ValidationError(GasPipeError, ValueError):
    """A parameter or argument failed validation."""


class PressureCollapseError(ValidationError):
    """The steady pressure profile reaches zero before the end of the pipe."""


class UnstableStepError(ValidationError):
    """The requested time step violates the integrator's step-size limit."""


class DimensionError(ValidationError):
    """Array shapes do not agree with the model."""


class SingularSolveError(GasPipeError, ArithmeticError):
    """The resolvent solve is singular (s sits on an eigenvalue)."""


class EigenSolverError(GasPipeError, ArithmeticError):
    """The dense eigensolver failed to converge."""
