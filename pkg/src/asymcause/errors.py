"""Exception hierarchy shared across the package.

Three broad families map onto the CLI exit codes: configuration problems
(exit 2), data problems (exit 3) and numerical failures (exit 4).
"""
from __future__ import annotations


class AsymcauseError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(AsymcauseError):
    """Invalid study configuration or CLI arguments."""


class DataError(AsymcauseError):
    """Problems with input data (ingestion, validation, alignment)."""


class LengthError(DataError):
    """A series is too short for the requested operation."""


class StructuralError(DataError):
    """Mismatched shapes or inconsistent paired structures."""


class MissingColumnError(DataError):
    """A declared CSV column is absent."""


class DateParseError(DataError):
    """A date cell could not be parsed."""


class DuplicateDateError(DataError):
    """The same period appears more than once."""


class PeriodGapError(DataError):
    """A period is missing from an equally-spaced sequence."""


class MissingValueError(DataError):
    """A value cell is empty, non-numeric or a known missing marker."""


class AlignmentError(DataError):
    """A series does not cover the requested study window."""


class FetchError(DataError):
    """A remote download failed and no usable cache exists."""


class SchemaError(DataError):
    """A downloaded document does not match the expected layout."""


class NumericalError(AsymcauseError):
    """Numerical failure (singularity, non-positive determinant, ...)."""


class SingularityError(NumericalError):
    """A design or system matrix is rank deficient."""


class DeterminantError(NumericalError):
    """A covariance determinant is non-positive."""
