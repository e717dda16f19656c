"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration/data problems exit with 1,
numeric failures (NaN losses, NaN gradients, domain violations detected mid
run) exit with 2.
"""


class ConfigError(ValueError):
    """Inconsistent configuration: bad dimensions, invalid flag combination."""


class DataError(ValueError):
    """Malformed or inconsistent dataset input."""


class NumericError(ArithmeticError):
    """Numeric failure during computation (NaN gradient, diverged loss)."""
