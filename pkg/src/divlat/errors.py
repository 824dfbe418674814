"""Exception hierarchy shared by every divlat module.

All errors derive from ``DivlatError`` (itself a ``ValueError``) so callers can
catch the whole family at the command-line boundary.
"""


class DivlatError(ValueError):
    """Base class of divlat errors."""


class NonPositiveEntry(DivlatError):
    pass


class SumNotOne(DivlatError):
    pass


class TooShort(DivlatError):
    pass


class DimensionMismatch(DivlatError):
    pass


class NotADivergence(DivlatError):
    pass


class EmptyGrid(DivlatError):
    pass


class IncompleteValues(DivlatError):
    pass


class OutOfRange(DivlatError):
    pass


class DenominatorVanishes(DivlatError):
    pass


class ExtrapolationDiverged(DivlatError):
    pass


class ZeroPolynomial(DivlatError):
    pass


class OddRowCount(DivlatError):
    pass


class ConfigError(DivlatError):
    pass


class RowValidationError(DivlatError):
    """A row of an input file failed validation.

    Args:
        row (int, mandatory): zero-based row index in the input file
        cause (DivlatError, mandatory): the underlying validation error

    """

    def __init__(self, row, cause):
        self.row = row
        self.cause = cause
        super().__init__(f"row {row}: {type(cause).__name__}: {cause}")


class MalformedRow(DivlatError):
    pass
