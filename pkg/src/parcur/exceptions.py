"""Exception and warning types raised across the package."""


class ParcurError(Exception):
    """Base class for all package errors."""

    code = "PARCUR_ERROR"


class DataError(ParcurError):
    """Bad input data or configuration (CLI exit status 1)."""

    code = "DATA_ERROR"


class NumericalError(ParcurError):
    """A numerical failure such as rank deficiency (CLI exit status 2)."""

    code = "NUMERICAL_ERROR"


class RankDeficient(NumericalError):
    code = "RANK_DEFICIENT"

    def __init__(self, message, rank=None, required=None):
        super().__init__(message)
        self.rank = rank
        self.required = required


class DuplicateParameter(NumericalError):
    """Two parameter values coincide, so a square Vandermonde matrix is singular."""

    code = "DUPLICATE_PARAMETER"


class DegenerateRange(DataError):
    code = "DEGENERATE_RANGE"


class ParseError(DataError):
    code = "PARSE_ERROR"

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaError(DataError):
    code = "SCHEMA_ERROR"


class NonFinite(ParseError):
    code = "NON_FINITE"


class ConfigError(DataError):
    code = "CONFIG_ERROR"


class DataFileMissing(DataError):
    code = "FILE_NOT_FOUND"


class ShapeError(DataError):
    code = "SHAPE_ERROR"


class ZeroNorm(NumericalError):
    code = "ZERO_NORM"


class ManualDegreeRequired(ConfigError):
    code = "MANUAL_DEGREE_REQUIRED"


class AllRemoved(NumericalError):
    code = "ALL_REMOVED"


class DuplicateParameterWarning(UserWarning):
    pass


class ConditioningWarning(UserWarning):
    pass


class ExtrapolationWarning(UserWarning):
    pass
