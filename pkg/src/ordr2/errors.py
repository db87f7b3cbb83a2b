"""Exception hierarchy shared across the package."""

from __future__ import annotations


class Ordr2Error(Exception):
    """Base class for all package errors."""


class DataError(Ordr2Error, ValueError):
    """Input data that cannot be used as given."""


class ParseError(DataError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.row = row
        self.column = column


class SchemaError(DataError):
    pass


class SingularDesignError(DataError):
    pass


class DegenerateResponseError(DataError):
    pass


class DegenerateDiscretizationError(DataError):
    pass


class ThresholdOrderError(Ordr2Error, ValueError):
    pass


class UndefinedMeasureError(Ordr2Error, ValueError):
    reason = "undefined"


class InapplicableMeasureError(UndefinedMeasureError):
    reason = "inapplicable"


class ConvergenceError(Ordr2Error, RuntimeError):
    """Raised when an optimizer stops without meeting its criteria.

    The last iterate is available as ``model`` so callers can still report it.
    """

    def __init__(self, message: str, model=None):
        super().__init__(message)
        self.model = model
