"""Exception types shared across the package.

The CLI maps these onto exit codes: validation/config problems exit 1,
numeric failures exit 2.
"""


class CoclearnError(Exception):
    """Base class for all package errors."""


class ShapeError(CoclearnError, ValueError):
    """Array dimensions do not match what an operation requires."""


class ValidationError(CoclearnError, ValueError):
    """Inputs or configuration violate a documented precondition."""


class ConfigError(ValidationError):
    """Experiment configuration is malformed or inconsistent."""


class NumericError(CoclearnError, ArithmeticError):
    """A computation produced non-finite values or is numerically undefined."""
