"""Exception types shared across the toolkit."""


class OriqError(Exception):
    """Base class for toolkit errors."""


class FormatError(OriqError):
    """An input file does not match its declared format (CLI exit code 2)."""


class DegenerateDataError(OriqError):
    """Data too degenerate to analyse: constant columns, empty joins,
    undersized groups (CLI exit code 3)."""
