"""Exception types shared across the toolkit."""

from __future__ import annotations


class ReproKitError(Exception):
    """Base class for every error raised by this package."""


class BundleError(ReproKitError):
    """The app bundle is malformed (missing manifest, bad schema, ...)."""


class LayoutError(BundleError):
    """A layout or menu XML file failed to parse or validate."""

    def __init__(self, message: str, path: str, line: int | None = None):
        loc = f"{path}:{line}" if line is not None else path
        super().__init__(f"{loc}: {message}")
        self.path = path
        self.line = line


class DuplicateIdError(BundleError):
    """The same resource id is declared twice within one activity."""


class ModelMalformedError(ReproKitError):
    """The behavior model is inconsistent with itself or the layouts."""


class InvalidGeometryError(ReproKitError):
    """Degenerate or out-of-frame rectangle."""


class DriverError(ReproKitError):
    """A device driver operation failed (unknown component, app not running)."""


class RipInterrupted(ReproKitError):
    """The driver failed mid-exploration; carries the graph built so far."""

    def __init__(self, message: str, partial_graph):
        super().__init__(message)
        self.partial_graph = partial_graph


class StaleSuggestionError(ReproKitError):
    """A step referenced a component or screenshot no current candidate offers."""


class SequencingError(ReproKitError):
    """A step arrived with a non-monotonic step number."""


class NotFoundError(ReproKitError):
    """Lookup by id failed (draft, report, step, shot, app)."""


class DraftValidationError(ReproKitError):
    """Invalid report-draft input; carries machine-readable field errors."""

    def __init__(self, field_errors: list[tuple[str, str]]):
        super().__init__("; ".join(f"{f}: {c}" for f, c in field_errors))
        self.field_errors = field_errors


class UnknownFormatError(ReproKitError):
    """Unsupported render format token."""


class NotReplayableError(ReproKitError):
    """The report does not chain through recorded transitions."""
