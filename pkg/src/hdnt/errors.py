"""Exception hierarchy.

Every error raised by the library derives from :class:`HdntError`.  The three
intermediate classes map onto CLI exit codes (2, 3 and 4 respectively).
"""


class HdntError(Exception):
    exit_code = 1


class ConfigError(HdntError, ValueError):
    exit_code = 2


class DataError(HdntError, ValueError):
    exit_code = 3


class NumericalError(HdntError, ArithmeticError):
    exit_code = 4


class InvalidConfig(ConfigError):
    pass


class InvalidMatrix(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class EmptySample(DataError):
    pass


class InsufficientSample(DataError):
    pass


class InsufficientPoints(DataError):
    pass


class SingularCovariance(DataError):
    pass


class EmptyNull(DataError):
    pass


class ShapeError(DataError):
    pass


class ParseError(DataError):
    """A non-numeric CSV cell.  ``row`` and ``col`` are 1-based file positions."""

    def __init__(self, row, col, value):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"non-numeric value {value!r} at row {row}, column {col}")


class DataIOError(DataError, OSError):
    pass


class NumericalFailure(NumericalError):
    pass


class NotPositiveSemidefinite(NumericalError):
    pass
