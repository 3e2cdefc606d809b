"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TrailnoteError(Exception):
    """Base class for all package errors."""


class UnknownActionError(TrailnoteError):
    def __init__(self, token: str):
        super().__init__(f"unknown action token: {token!r}")
        self.token = token


class MalformedRecordError(TrailnoteError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"malformed record at line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class EmptyLogError(TrailnoteError):
    pass


class InvalidRefError(TrailnoteError):
    def __init__(self, rule: str):
        super().__init__(f"invalid entity reference: {rule}")
        self.rule = rule


class MissingSaveEventError(TrailnoteError):
    def __init__(self, note_id: str):
        super().__init__(f"no save/update event found for note {note_id!r}")
        self.note_id = note_id


class UnknownFeatureError(TrailnoteError):
    pass


class ConfigError(TrailnoteError):
    pass


class InfeasibleSplitError(TrailnoteError):
    pass


class SingleClassError(TrailnoteError):
    pass


class EmptyDataError(TrailnoteError):
    pass


class EmptyTestError(TrailnoteError):
    pass


class DimensionTooLargeError(TrailnoteError):
    def __init__(self, d: int, limit: int):
        super().__init__(
            f"{d} features exceed the exact enumeration limit of {limit}; "
            "use the sampled estimator"
        )
        self.d = d
        self.limit = limit


class DegenerateDataError(TrailnoteError):
    pass


class UnknownNoteError(TrailnoteError):
    def __init__(self, note_id: str):
        super().__init__(f"unknown note: {note_id!r}")
        self.note_id = note_id


class NoModelLoadedError(TrailnoteError):
    def __init__(self) -> None:
        super().__init__("no-model-loaded")


class InvalidProfileError(TrailnoteError):
    pass
