"""Exceptions raised by the binary codec."""
from __future__ import annotations

from typing import Optional


class StreamError(ValueError):
    """Base class for binary stream failures."""

    code = "stream-error"


class EncodeError(StreamError):
    code = "encode-error"


class FeatureError(EncodeError):
    """A term or statement is not allowed by the stream's feature flags."""

    code = "feature"


class TableOverflowError(EncodeError):
    """One row needs more distinct entries than a lookup table can hold."""

    code = "table-overflow"


class OversizedEntryError(EncodeError):
    code = "oversized-entry"


class DecodeError(StreamError):
    """Malformed stream.  Carries whatever location info was known."""

    code = "decode-error"

    def __init__(self, message: str, *, frame: Optional[int] = None,
                 row: Optional[int] = None, offset: Optional[int] = None) -> None:
        self.message = message
        self.frame = frame
        self.row = row
        self.offset = offset
        where = []
        if frame is not None:
            where.append(f"frame {frame}")
        if row is not None:
            where.append(f"row {row}")
        if offset is not None:
            where.append(f"byte offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class BadMagicError(DecodeError):
    code = "bad-magic"


class OptionsError(DecodeError):
    """Options row missing, duplicated, or carrying invalid values."""

    code = "options"


class UnknownRowError(DecodeError):
    code = "unknown-row"


class UnknownTermKindError(DecodeError):
    code = "unknown-term-kind"


class UnsetLookupIdError(DecodeError):
    code = "unset-lookup-id"


class BadLookupIdError(DecodeError):
    """Entry or reference id outside ``1..capacity``."""

    code = "bad-lookup-id"


class EmptyRegisterError(DecodeError):
    code = "empty-register"


class TruncatedError(DecodeError):
    code = "truncated"


class FrameLimitError(DecodeError):
    code = "frame-limit"


class VarintError(DecodeError):
    """Overlong or out-of-range varint."""

    code = "varint"


class StreamFeatureError(DecodeError):
    """Stream content violates its own declared feature flags."""

    code = "feature"


class BadStringError(DecodeError):
    code = "bad-string"
