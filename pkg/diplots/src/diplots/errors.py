"""Errors raised while reading report tables or building figures."""


class PlotError(Exception):
    """Base class for everything this package raises on purpose."""


class SchemaError(PlotError):
    """An input CSV is missing a column the figure needs.

    The offending column name is kept in ``column`` so callers can report
    it without parsing the message.
    """

    def __init__(self, column: str, path: str) -> None:
        super().__init__(f"{path}: missing required column {column!r}")
        self.column = column
        self.path = path


class EmptyInput(PlotError):
    """The input CSV (or the concatenation of several) has no data rows."""
