"""
Exception hierarchy shared by all modules.
"""


class PhloError(Exception):
    """Base class for toolkit errors."""


class DegreeError(PhloError, ValueError):
    """Form grades do not fit the requested operation."""


class NumericError(PhloError, ArithmeticError):
    """A sampled value, step or flow became non-finite or invalid."""


class ConfigError(PhloError, ValueError):
    """Configuration could not be read or failed validation."""


class CoverageError(PhloError):
    """A quadrature grid does not cover the support of the integrand."""


class InvariantViolation(PhloError, AssertionError):
    """An internal invariant failed; indicates an implementation bug."""
