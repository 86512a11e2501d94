"""Error taxonomy shared by all modules.

The CLI maps these onto exit codes: parameter problems (DomainError,
RangeError, CapacityError) are usage errors, NumericError is a numeric
failure. Everything derives from CesaroFieldsError so callers can catch
library errors without catching bugs.
"""


class CesaroFieldsError(Exception):
    pass


class DomainError(CesaroFieldsError, ValueError):
    """Parameter outside the mathematical domain of an operation."""


class RangeError(CesaroFieldsError, ValueError):
    """Index or checkpoint outside the declared extent."""


class CapacityError(CesaroFieldsError, RuntimeError):
    """Request exceeds a configured memory or cost budget."""


class NumericError(CesaroFieldsError, ArithmeticError):
    """A numerical routine failed to reach its accuracy target."""
