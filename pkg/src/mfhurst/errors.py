"""Exception hierarchy shared by every module.

Callers mostly care about two families: :class:`InputError` covers
malformed data and invalid configuration, :class:`NumericalError` covers
estimation breakdowns on structurally valid input (a constant window, a
vanishing fluctuation function).  The CLI maps the families to exit
codes 1 and 2.
"""


class MfhurstError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(MfhurstError, ValueError):
    """Malformed input data or invalid configuration."""

    exit_code = 1


class NumericalError(MfhurstError, ArithmeticError):
    """Estimation failed numerically on otherwise valid input."""

    exit_code = 2
