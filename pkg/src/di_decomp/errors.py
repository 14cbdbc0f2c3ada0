"""Exception hierarchy shared across the toolkit.

Three failure families map onto the CLI exit codes: configuration problems
(exit 2), data problems (exit 3), and numerical problems (exit 4).
"""

from __future__ import annotations


class DiDecompError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(DiDecompError):
    """Invalid or inconsistent configuration (CLI exit code 2)."""


class DataError(DiDecompError):
    """Unusable input data (CLI exit code 3)."""


class InsufficientDataError(DataError):
    """Too few observations for the requested operation."""


class DomainError(DataError):
    """A value outside the mathematical domain of a transform."""


class SchemaError(DataError):
    """Column names or layout do not match the expected schema."""


class ParseError(DataError):
    """A file or payload could not be parsed."""


class FetchError(DataError):
    """A remote fetch failed after retries."""


class NumericalError(DiDecompError):
    """Numerically degenerate problem (CLI exit code 4)."""


class SingularDesignError(NumericalError):
    """Rank-deficient regression design."""


class DegenerateColumnError(NumericalError):
    """A column with zero sample variance where variation is required."""


class DegenerateTargetError(NumericalError):
    """A target vector with zero sample variance where variation is required."""


class StageError(DiDecompError):
    """Wraps a failure with the name of the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the documented CLI exit code."""
    if isinstance(exc, StageError):
        exc = exc.cause
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, NumericalError):
        return 4
    if isinstance(exc, (DataError, OSError)):
        return 3
    return 1
