"""Fixed-width big-endian-within-byte bit packing for container sections."""

from __future__ import annotations

import numpy as np

from szpm.core import CorruptStreamError


def packed_size(count: int, width: int) -> int:
    """Bytes needed to hold ``count`` fields of ``width`` bits each."""
    return (count * width + 7) // 8


def pack_uints(values, width: int) -> bytes:
    """Pack unsigned integers into ``width``-bit fields, MSB first."""
    values = np.asarray(values, dtype=np.uint64)
    if width == 0 or values.size == 0:
        return b""
    if width > 64:
        raise ValueError("field width above 64 bits is unsupported")
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    bits = ((values[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits.ravel()).tobytes()


def unpack_uints(buf: bytes, width: int, count: int) -> np.ndarray:
    """Inverse of ``pack_uints``; returns a uint64 array of length ``count``."""
    if width == 0 or count == 0:
        return np.zeros(count, dtype=np.uint64)
    need = packed_size(count, width)
    if len(buf) < need:
        raise CorruptStreamError("corrupt stream: packed field section truncated")
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8), count=count * width)
    bits = bits.reshape(count, width).astype(np.uint64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return (bits << shifts).sum(axis=1, dtype=np.uint64)


def pack_bits(bits) -> bytes:
    """Pack a 0/1 array into bytes, MSB first."""
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.size == 0:
        return b""
    return np.packbits(arr).tobytes()


def unpack_bits(buf: bytes, count: int) -> np.ndarray:
    """Inverse of ``pack_bits``; returns a uint8 array of length ``count``."""
    if count == 0:
        return np.zeros(0, dtype=np.uint8)
    if len(buf) < (count + 7) // 8:
        raise CorruptStreamError("corrupt stream: bitmask section truncated")
    return np.unpackbits(np.frombuffer(buf, dtype=np.uint8), count=count)
