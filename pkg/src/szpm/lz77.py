"""Byte-level LZ77 over a split search/look-ahead window.

Used both as the optional final lossless pass over the container sections and
standalone. Tokens are ``(offset, length, next byte)`` with offset measured
backwards from the current position; a literal is ``(0, 0, byte)``. Matching
is greedy longest-match with smallest-offset tie-breaking, the match length
is capped at one below the look-ahead so every token carries its following
literal, and the window advances by ``length + 1`` per token.
"""

from __future__ import annotations

import struct
from typing import NamedTuple

import numpy as np

from szpm import bitpack, kernels
from szpm.core import CorruptStreamError, ValidationError


class Lz77Token(NamedTuple):
    offset: int
    length: int
    next: int


_FRAME_HEADER = struct.Struct("<IIQQ")


def _check_caps(search_cap: int, lookahead_cap: int):
    if search_cap < 1 or lookahead_cap < 1:
        raise ValidationError("window capacities must be >= 1")
    if search_cap > (1 << 30) or lookahead_cap > (1 << 30):
        raise ValidationError("window capacities too large")


def lz77_compress(data: bytes, search_cap: int = 4096, lookahead_cap: int = 64):
    """Tokenize ``data``; ``lz77_decompress`` reproduces it exactly."""
    _check_caps(search_cap, lookahead_cap)
    offs, lens, nxts = kernels.lz77_encode(bytes(data), search_cap, lookahead_cap)
    return [Lz77Token(int(o), int(l), int(x)) for o, l, x in zip(offs, lens, nxts)]


def lz77_decompress(tokens) -> bytes:
    """Rebuild the byte stream from tokens; malformed tokens raise
    ``CorruptStreamError``."""
    offs = np.array([t[0] for t in tokens], dtype=np.uint32)
    lens = np.array([t[1] for t in tokens], dtype=np.uint32)
    nxts = np.array([t[2] for t in tokens], dtype=np.uint8)
    return kernels.lz77_decode(offs, lens, nxts)


def encode_frame(data: bytes, search_cap: int = 4096, lookahead_cap: int = 64) -> bytes:
    """Self-describing serialized token stream for ``data``."""
    _check_caps(search_cap, lookahead_cap)
    offs, lens, nxts = kernels.lz77_encode(bytes(data), search_cap, lookahead_cap)
    off_w = int(search_cap).bit_length()
    len_w = int(lookahead_cap - 1).bit_length()
    head = _FRAME_HEADER.pack(search_cap, lookahead_cap, len(offs), len(data))
    return b"".join([
        head,
        bitpack.pack_uints(offs, off_w),
        bitpack.pack_uints(lens, len_w),
        nxts.tobytes(),
    ])


def decode_frame(buf: bytes) -> bytes:
    """Inverse of ``encode_frame``."""
    if len(buf) < _FRAME_HEADER.size:
        raise CorruptStreamError("corrupt stream: lz77 frame truncated")
    search_cap, lookahead_cap, count, raw_len = _FRAME_HEADER.unpack_from(buf)
    if search_cap < 1 or lookahead_cap < 1:
        raise CorruptStreamError("corrupt stream: lz77 frame")
    off_w = int(search_cap).bit_length()
    len_w = int(lookahead_cap - 1).bit_length()
    pos = _FRAME_HEADER.size
    off_bytes = bitpack.packed_size(count, off_w)
    len_bytes = bitpack.packed_size(count, len_w)
    if len(buf) != pos + off_bytes + len_bytes + count:
        raise CorruptStreamError("corrupt stream: lz77 frame truncated")
    offs = bitpack.unpack_uints(buf[pos:pos + off_bytes], off_w, count).astype(np.uint32)
    pos += off_bytes
    lens = bitpack.unpack_uints(buf[pos:pos + len_bytes], len_w, count).astype(np.uint32)
    pos += len_bytes
    nxts = np.frombuffer(buf[pos:pos + count], dtype=np.uint8)
    out = kernels.lz77_decode(offs, lens, nxts)
    if len(out) != raw_len:
        raise CorruptStreamError("corrupt stream: lz77 frame length mismatch")
    return out
