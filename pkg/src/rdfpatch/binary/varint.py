"""Unsigned LEB128 varints limited to 32 bits."""
from __future__ import annotations

from .errors import TruncatedError, VarintError

MAX_VARINT = (1 << 32) - 1

_SMALL = [bytes((i,)) for i in range(128)]


def varint_encode(value: int) -> bytes:
    if value < 128:
        if value < 0:
            raise ValueError(f"varint must be non-negative, got {value}")
        return _SMALL[value]
    if value > MAX_VARINT:
        raise ValueError(f"varint out of range: {value}")
    out = bytearray()
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)
    return bytes(out)


def write_varint(buf: bytearray, value: int) -> None:
    """Append the encoding of ``value`` to ``buf`` (no range check for small values)."""
    if value < 0x80:
        buf.append(value)
        return
    buf += varint_encode(value)


def varint_decode(data, pos: int = 0) -> tuple[int, int]:
    """Decode one varint at ``pos``; returns ``(value, bytes_consumed)``."""
    value, end = read_varint(data, pos)
    return value, end - pos


def read_varint(data, pos: int) -> tuple[int, int]:
    """Decode one varint at ``pos``; returns ``(value, new_pos)``.

    Rejects truncation, non-minimal encodings and values of 2**32 or more.
    """
    n = len(data)
    result = 0
    shift = 0
    start = pos
    while True:
        if pos >= n:
            raise TruncatedError("truncated varint", offset=start)
        b = data[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if b < 0x80:
            if b == 0 and pos - start > 1:
                raise VarintError("overlong varint encoding", offset=start)
            if result > MAX_VARINT:
                raise VarintError("varint exceeds 32 bits", offset=start)
            return result, pos
        shift += 7
        if shift >= 35:
            raise VarintError("varint longer than 5 bytes", offset=start)
