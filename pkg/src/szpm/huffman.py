"""Canonical Huffman coding of quantization codes.

Tree construction is the classic two-node merge with deterministic
tie-breaking (leaves by symbol value, internal nodes by creation order), so
identical inputs always produce identical tables. Only code lengths matter
for the wire format; codewords are reassigned canonically, sorted by
(length, symbol).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from szpm import kernels
from szpm.core import CorruptStreamError, ValidationError

MAX_CODE_LENGTH = 63  # codewords are packed through uint64 staging


@dataclass
class HuffmanTable:
    """Canonical code table plus the derived encode/decode arrays.

    ``symbols``/``lengths`` are parallel, sorted by symbol value; everything
    else is computed. Kraft holds by construction: sum(2^-len) <= 1.
    """

    symbols: np.ndarray
    lengths: np.ndarray
    enc_len: np.ndarray = field(init=False, repr=False)
    enc_code: np.ndarray = field(init=False, repr=False)
    first: np.ndarray = field(init=False, repr=False)
    counts: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)
    canon_symbols: np.ndarray = field(init=False, repr=False)
    max_len: int = field(init=False)

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int64)
        self.lengths = np.asarray(self.lengths, dtype=np.uint8)
        if len(self.symbols) != len(self.lengths) or len(self.symbols) == 0:
            raise CorruptStreamError("corrupt stream: huffman table")
        if self.symbols.min() < 0:
            raise CorruptStreamError("corrupt stream: huffman table")
        if len(np.unique(self.symbols)) != len(self.symbols):
            raise CorruptStreamError("corrupt stream: huffman table")
        lens = self.lengths.astype(np.int64)
        if lens.min() < 1 or lens.max() > MAX_CODE_LENGTH:
            raise CorruptStreamError("corrupt stream: huffman table")
        self.max_len = int(lens.max())
        # Kraft inequality; violations make canonical assignment overflow
        if sum(1 << (self.max_len - int(l)) for l in lens) > (1 << self.max_len):
            raise CorruptStreamError("corrupt stream: huffman table")
        order = np.lexsort((self.symbols, lens))
        self.canon_symbols = self.symbols[order].astype(np.int32)
        sorted_lens = lens[order]
        codes = np.zeros(len(order), dtype=np.uint64)
        code = 0
        for i in range(len(order)):
            if i:
                code = (code + 1) << int(sorted_lens[i] - sorted_lens[i - 1])
            codes[i] = code
        alphabet = int(self.symbols.max()) + 1
        self.enc_len = np.zeros(alphabet, dtype=np.uint8)
        self.enc_code = np.zeros(alphabet, dtype=np.uint64)
        self.enc_len[self.symbols] = self.lengths
        self.enc_code[self.canon_symbols] = codes
        self.first = np.zeros(self.max_len + 1, dtype=np.int64)
        self.counts = np.zeros(self.max_len + 1, dtype=np.int64)
        self.offsets = np.zeros(self.max_len + 1, dtype=np.int64)
        for length in range(1, self.max_len + 1):
            sel = sorted_lens == length
            self.counts[length] = int(sel.sum())
            if self.counts[length]:
                idx = int(np.argmax(sel))
                self.first[length] = int(codes[idx])
                self.offsets[length] = idx

    def bit_length_of(self, codes) -> int:
        """Total encoded bits for a code sequence under this table."""
        codes = np.asarray(codes, dtype=np.int64)
        if codes.size == 0:
            return 0
        return int(self.enc_len[codes].astype(np.int64).sum())


def build_table(codes) -> HuffmanTable:
    """Build the optimal table for the empirical frequencies of ``codes``.

    Deterministic: heap ties break on symbol value. A single-symbol stream
    gets a 1-bit codeword.
    """
    arr = np.asarray(codes, dtype=np.int64)
    if arr.size == 0:
        raise ValidationError("empty input")
    if arr.min() < 0:
        raise ValidationError("codes must be non-negative")
    freq = np.bincount(arr)
    symbols = np.nonzero(freq)[0]
    if len(symbols) == 1:
        return HuffmanTable(symbols, np.array([1], dtype=np.uint8))
    # heap entries: (weight, tiebreak order, node id); leaves use their symbol
    # as order, internal nodes get increasing ids past the largest symbol
    children: list[tuple[int, int] | None] = [None] * len(symbols)
    heap = [(int(freq[sym]), int(sym), i) for i, sym in enumerate(symbols)]
    heapq.heapify(heap)
    next_order = int(symbols[-1]) + 1
    while len(heap) > 1:
        w1, _, a = heapq.heappop(heap)
        w2, _, b = heapq.heappop(heap)
        children.append((a, b))
        heapq.heappush(heap, (w1 + w2, next_order, len(children) - 1))
        next_order += 1
    depths = np.zeros(len(children), dtype=np.int64)
    root = heap[0][2]
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        if children[node] is None:
            depths[node] = depth
        else:
            a, b = children[node]
            stack.append((a, depth + 1))
            stack.append((b, depth + 1))
    lengths = depths[:len(symbols)]
    if lengths.max() > MAX_CODE_LENGTH:
        raise ValidationError("huffman code length overflow")
    return HuffmanTable(symbols, lengths.astype(np.uint8))


def encode(codes, table: HuffmanTable):
    """Encode to a padded byte string; returns ``(payload, nbits)``."""
    arr = np.asarray(codes, dtype=np.int64)
    if arr.size == 0:
        return b"", 0
    if arr.min() < 0 or arr.max() >= len(table.enc_len) or (table.enc_len[arr] == 0).any():
        raise ValidationError("unknown symbol")
    return kernels.huffman_encode(arr, table.enc_len, table.enc_code)


def decode(payload: bytes, nbits: int, count: int, table: HuffmanTable) -> np.ndarray:
    """Decode exactly ``count`` symbols; truncated or malformed input raises
    ``CorruptStreamError``."""
    if nbits > len(payload) * 8:
        raise CorruptStreamError("corrupt stream: huffman payload truncated")
    return kernels.huffman_decode(payload, nbits, count, table.first, table.counts,
                                  table.offsets, table.canon_symbols, table.max_len)
