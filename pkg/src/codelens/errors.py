"""Exception hierarchy shared by all codelens modules."""

from __future__ import annotations


class CodeLensError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CodeLensError):
    """A value violates a documented invariant; the message names the field."""


class NotFoundError(CodeLensError):
    """Lookup of an unknown image id."""

    def __init__(self, image_id: str):
        super().__init__(f"unknown image id: {image_id!r}")
        self.image_id = image_id


class FormatError(CodeLensError):
    """A persisted artifact does not parse (bad magic, malformed JSON, trailing bytes)."""


class TruncatedError(FormatError):
    """A binary file ended mid-record."""


class VersionError(FormatError):
    """A persisted artifact declares an unsupported format version."""


class SpaceMismatchError(CodeLensError):
    """An embedding tagged with one space was used where the other was expected."""


class CoverageError(CodeLensError):
    """An embedding set does not cover a gallery manifest exactly."""


class AdapterError(CodeLensError):
    """An external adapter subprocess failed; carries its captured diagnostics."""

    def __init__(self, message: str, returncode: int | None = None, stderr: str = ""):
        super().__init__(message)
        self.returncode = returncode
        self.stderr = stderr
