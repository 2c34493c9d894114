"""Exception types shared across the toolkit.

Every error a caller is expected to handle lives here so the CLI can map
exception classes to exit codes without importing half the package.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DataError(ToolkitError):
    """A problem with input data (corpus files, prediction files, formats)."""


class CorpusError(DataError):
    """Raised while parsing a dataset line; carries the line number."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class MalformedLine(CorpusError):
    pass


class ComplexWordNotInSentence(CorpusError):
    pass


class EmptyGold(CorpusError):
    pass


class LexiconError(DataError):
    pass


class SourceFormatError(DataError):
    """Raised when a serialized source string cannot be built or parsed."""


class MissingPrefix(SourceFormatError):
    pass


class MissingSeparator(SourceFormatError):
    pass


class MissingMarkers(SourceFormatError):
    pass


class MarkerConflict(SourceFormatError):
    """Sentence already contains marker or separator text."""


class MetricsError(DataError):
    pass


class BackendError(ToolkitError):
    """A candidate-generation or model backend failed."""

    def __init__(self, message: str, backend: str | None = None):
        self.backend = backend
        if backend:
            message = f"[{backend}] {message}"
        super().__init__(message)


class BackendUnavailable(BackendError):
    pass


class BackendReturnedNothing(BackendError):
    """The backend produced zero raw candidates (before any filtering)."""


class EmbedderError(BackendError):
    pass


class SearchError(ToolkitError):
    pass
