"""Exception hierarchy shared across the package.

``TrendmineError`` is the common base; ``ValidationError`` covers bad input
values and configuration (CLI exit code 1), while plain ``OSError`` is left
to signal I/O failures (CLI exit code 2).
"""


class TrendmineError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(TrendmineError):
    """Invalid input data, arguments, or configuration."""


class RecordError(ValidationError):
    """A single input line could not be turned into a record."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class MalformedRecord(RecordError):
    """Wrong field count, unparseable value, or schema violation."""


class EmptyText(RecordError):
    """Record text is empty after trimming."""


class CoordinateOutOfRange(RecordError):
    """Latitude outside [-90, 90] or longitude outside [-180, 180]."""


class MissingLabelClass(ValidationError):
    """Training data lacks at least one example of some label."""


class DuplicateCode(ValidationError):
    """Two state points share the same code."""


class CodeMismatch(ValidationError):
    """Predicted and actual state maps cover different codes."""


class EmptyCorpus(ValidationError):
    """No non-empty documents to model."""


class TopicIndexOutOfRange(ValidationError):
    """Topic index outside [0, K)."""


class SeriesTooShort(ValidationError):
    """Trend series has fewer points than the operation requires."""


class EmptySample(ValidationError):
    """An operation requiring a non-empty sample received none."""


class NoOverlap(ValidationError):
    """Poll and sentiment date ranges do not overlap."""


class InvalidSpec(ValidationError):
    """Synthetic scenario specification is inconsistent."""
