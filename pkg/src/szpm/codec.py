"""End-to-end compression, decompression, and the bit-exact container format.

Container layout (little-endian): a fixed header, then six length-prefixed
sections in a fixed order: Huffman table, Huffman payload, predmd bitmask,
packed match offsets, float32 sequence means, verbatim float32 unpredictable
values. Unpredictable points are flagged inside the Huffman stream with a
reserved escape symbol (value = interval count), so no separate mask section
is needed. When the final LZ77 pass is enabled the header stays plain and
the concatenated sections are wrapped in one LZ77 frame.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from szpm import bitpack, huffman, kernels, lz77
from szpm.core import (
    CompressionParams,
    CorruptStreamError,
    ErrorBound,
    ValidationError,
    as_float_array,
    resolve_error_bound,
    validate_params,
)
from szpm.predict import segment_sort

MAGIC = b"SZPM"
VERSION = 1

_FLAG_LZ77 = 1

_PREDICTOR_IDS = {"sz-lv": 0, "sz-sort": 1, "sz-pm": 2}
_PREDICTOR_NAMES = {v: k for k, v in _PREDICTOR_IDS.items()}
_EB_MODE_IDS = {"abs": 0, "rel": 1}
_EB_MODE_NAMES = {v: k for k, v in _EB_MODE_IDS.items()}

_HEADER = struct.Struct("<4sHHBBIIIddddQQQQQQff")
_SECTION_LEN = struct.Struct("<Q")
_TABLE_COUNT = struct.Struct("<I")

# final-pass LZ77 window geometry; entropy-coded payloads rarely shrink, the
# float sections sometimes do
_WRAP_SEARCH = 4096
_WRAP_LOOKAHEAD = 64


@dataclass(eq=False)
class CompressedArtifact:
    """Parsed form of one compressed array; ``to_bytes`` is deterministic."""

    params: CompressionParams
    resolved_abs: float
    n_values: int
    vmin: float
    vmax: float
    n_sequences: int
    matched_count: int
    code_count: int
    unpredictable_count: int
    payload_bits: int
    table_symbols: np.ndarray
    table_lengths: np.ndarray
    payload: bytes
    predmd: bytes
    offsets: bytes
    means: bytes
    unpredictable: bytes
    lz77_wrapped: bool = False

    def _sections(self) -> list[bytes]:
        table = (_TABLE_COUNT.pack(len(self.table_symbols))
                 + self.table_symbols.astype("<u2").tobytes()
                 + self.table_lengths.astype("u1").tobytes())
        return [table, self.payload, self.predmd, self.offsets, self.means,
                self.unpredictable]

    def _header_bytes(self) -> bytes:
        p = self.params
        flags = _FLAG_LZ77 if self.lz77_wrapped else 0
        return _HEADER.pack(
            MAGIC, VERSION, flags,
            _PREDICTOR_IDS[p.predictor], _EB_MODE_IDS[p.error_bound.mode],
            p.intervals, p.m, p.n,
            p.error_bound.value, self.resolved_abs, p.p, p.theta,
            self.n_values, self.n_sequences, self.matched_count,
            self.code_count, self.unpredictable_count, self.payload_bits,
            self.vmin, self.vmax,
        )

    def to_bytes(self) -> bytes:
        body = b"".join(_SECTION_LEN.pack(len(s)) + s for s in self._sections())
        if self.lz77_wrapped:
            frame = lz77.encode_frame(body, _WRAP_SEARCH, _WRAP_LOOKAHEAD)
            body = _SECTION_LEN.pack(len(frame)) + frame
        return self._header_bytes() + body

    @property
    def logical_nbytes(self) -> int:
        """Size of the unwrapped layout: header plus plain sections."""
        return (_HEADER.size
                + sum(_SECTION_LEN.size + len(s) for s in self._sections()))

    @classmethod
    def from_bytes(cls, buf: bytes) -> "CompressedArtifact":
        if len(buf) < _HEADER.size:
            raise CorruptStreamError("corrupt stream: header truncated")
        (magic, version, flags, pred_id, eb_id, intervals, m, n,
         eb_value, resolved_abs, p_exp, theta, n_values, n_sequences,
         matched, code_count, unpred_count, payload_bits,
         vmin, vmax) = _HEADER.unpack_from(buf)
        if magic != MAGIC:
            raise CorruptStreamError("corrupt stream: bad magic")
        if version != VERSION:
            raise CorruptStreamError(f"corrupt stream: unsupported version {version}")
        if pred_id not in _PREDICTOR_NAMES or eb_id not in _EB_MODE_NAMES:
            raise CorruptStreamError("corrupt stream: header fields")
        try:
            # params carry the unresolved bound; resolved_abs lives beside it
            params = validate_params(CompressionParams(
                error_bound=ErrorBound(_EB_MODE_NAMES[eb_id], eb_value),
                predictor=_PREDICTOR_NAMES[pred_id], intervals=intervals,
                m=m, n=n, p=p_exp, theta=theta,
                final_lz77=bool(flags & _FLAG_LZ77),
            ))
        except ValidationError as exc:
            raise CorruptStreamError(f"corrupt stream: header params ({exc})") from exc
        body = buf[_HEADER.size:]
        wrapped = bool(flags & _FLAG_LZ77)
        if wrapped:
            if len(body) < _SECTION_LEN.size:
                raise CorruptStreamError("corrupt stream: lz77 wrapper truncated")
            (frame_len,) = _SECTION_LEN.unpack_from(body)
            if len(body) != _SECTION_LEN.size + frame_len:
                raise CorruptStreamError("corrupt stream: lz77 wrapper truncated")
            body = lz77.decode_frame(body[_SECTION_LEN.size:])

        names = ("huffman table", "huffman payload", "predmd", "offsets",
                 "means", "unpredictable")
        sections = []
        pos = 0
        for name in names:
            if len(body) < pos + _SECTION_LEN.size:
                raise CorruptStreamError(f"corrupt stream: {name} section truncated")
            (length,) = _SECTION_LEN.unpack_from(body, pos)
            pos += _SECTION_LEN.size
            if len(body) < pos + length:
                raise CorruptStreamError(f"corrupt stream: {name} section truncated")
            sections.append(body[pos:pos + length])
            pos += length
        if pos != len(body):
            raise CorruptStreamError("corrupt stream: trailing data")
        table_sec, payload, predmd, offsets, means, unpred = sections

        if len(table_sec) < _TABLE_COUNT.size:
            raise CorruptStreamError("corrupt stream: huffman table section truncated")
        (sym_count,) = _TABLE_COUNT.unpack_from(table_sec)
        if len(table_sec) != _TABLE_COUNT.size + 3 * sym_count:
            raise CorruptStreamError("corrupt stream: huffman table section truncated")
        syms = np.frombuffer(table_sec, dtype="<u2", count=sym_count,
                             offset=_TABLE_COUNT.size).astype(np.int64)
        lens = np.frombuffer(table_sec, dtype="u1", count=sym_count,
                             offset=_TABLE_COUNT.size + 2 * sym_count)
        if sym_count and syms.max() > params.intervals:
            raise CorruptStreamError("corrupt stream: huffman table")

        art = cls(
            params=params, resolved_abs=resolved_abs, n_values=n_values,
            vmin=vmin, vmax=vmax, n_sequences=n_sequences,
            matched_count=matched, code_count=code_count,
            unpredictable_count=unpred_count, payload_bits=payload_bits,
            table_symbols=syms.astype(np.uint16), table_lengths=lens.copy(),
            payload=payload, predmd=predmd, offsets=offsets, means=means,
            unpredictable=unpred, lz77_wrapped=wrapped,
        )
        art._check_consistency()
        return art

    def _check_consistency(self):
        p = self.params
        if self.n_values < 1:
            raise CorruptStreamError("corrupt stream: empty artifact")
        if self.code_count + self.unpredictable_count != self.n_values:
            raise CorruptStreamError("corrupt stream: point counts")
        if not (np.isfinite(self.resolved_abs) and self.resolved_abs > 0):
            raise CorruptStreamError("corrupt stream: header params")
        if len(self.payload) != (self.payload_bits + 7) // 8:
            raise CorruptStreamError("corrupt stream: huffman payload section truncated")
        if p.predictor == "sz-pm":
            expect_s = self.n_values // p.n
            if self.n_sequences != expect_s:
                raise CorruptStreamError("corrupt stream: predmd section")
            if self.matched_count > self.n_sequences:
                raise CorruptStreamError("corrupt stream: predmd section")
            if len(self.predmd) != (self.n_sequences + 7) // 8:
                raise CorruptStreamError("corrupt stream: predmd section truncated")
            if self.n_sequences:
                mask = bitpack.unpack_bits(self.predmd, self.n_sequences)
                if int((mask == 0).sum()) != self.matched_count:
                    raise CorruptStreamError("corrupt stream: predmd section")
            if len(self.offsets) != bitpack.packed_size(self.matched_count, p.offset_bits):
                raise CorruptStreamError("corrupt stream: offsets section truncated")
            if len(self.means) != 4 * self.matched_count:
                raise CorruptStreamError("corrupt stream: means section truncated")
        else:
            if self.n_sequences or self.matched_count:
                raise CorruptStreamError("corrupt stream: predmd section")
            if self.predmd or self.offsets or self.means:
                raise CorruptStreamError("corrupt stream: predmd section")
        if len(self.unpredictable) != 4 * self.unpredictable_count:
            raise CorruptStreamError("corrupt stream: unpredictable section truncated")


def reference_stream(values, params: CompressionParams) -> np.ndarray:
    """The stream decompression reproduces: the input itself for sz-lv, the
    segment-sorted input for sz-sort and sz-pm. Error verification must
    compare against this."""
    params = validate_params(params)
    arr = as_float_array(values)
    if params.predictor == "sz-lv":
        return arr.copy()
    return segment_sort(arr, params.n)


def _compress_state(values, params: CompressionParams):
    """Compression plus the in-loop state the tests inspect: returns
    ``(artifact, coded stream, dense codes, reconstructed stream)``."""
    arr = as_float_array(values)
    if arr.size == 0:
        raise ValidationError("empty input")
    params = validate_params(params)
    bound = resolve_error_bound(arr, params.error_bound)
    eb = bound.resolved_abs
    params = replace(params, error_bound=ErrorBound(bound.mode, bound.value))
    vmin = float(arr.min())
    vmax = float(arr.max())

    if params.predictor == "sz-lv":
        stream = arr.copy()
    else:
        stream = segment_sort(arr, params.n)

    if params.predictor == "sz-pm":
        codes, recon, predmd_arr, offsets_arr, means_arr = kernels.pm_encode(
            stream, params.m, params.n, params.p, params.theta, eb, params.intervals)
        n_seq = len(predmd_arr)
        matched_sel = predmd_arr == 0
        matched = int(matched_sel.sum())
        predmd_bytes = bitpack.pack_bits(predmd_arr)
        offsets_bytes = bitpack.pack_uints(offsets_arr[matched_sel], params.offset_bits)
        means_bytes = means_arr[matched_sel].astype("<f4").tobytes()
    else:
        codes, recon = kernels.lv_encode(stream, eb, params.intervals)
        n_seq = 0
        matched = 0
        predmd_bytes = b""
        offsets_bytes = b""
        means_bytes = b""

    symbols = np.where(codes >= 0, codes, params.intervals).astype(np.int64)
    table = huffman.build_table(symbols)
    payload, payload_bits = huffman.encode(symbols, table)
    unpred_vals = stream[codes < 0]

    artifact = CompressedArtifact(
        params=params, resolved_abs=eb, n_values=int(arr.size),
        vmin=vmin, vmax=vmax, n_sequences=n_seq, matched_count=matched,
        code_count=int((codes >= 0).sum()),
        unpredictable_count=int(unpred_vals.size), payload_bits=payload_bits,
        table_symbols=table.symbols.astype(np.uint16),
        table_lengths=table.lengths.copy(),
        payload=payload, predmd=predmd_bytes, offsets=offsets_bytes,
        means=means_bytes, unpredictable=unpred_vals.astype("<f4").tobytes(),
        lz77_wrapped=params.final_lz77,
    )
    return artifact, stream, codes, recon


def compress(values, params: CompressionParams) -> CompressedArtifact:
    """Compress a float32 array. Deterministic: identical inputs and params
    give byte-identical artifacts."""
    return _compress_state(values, params)[0]


def decompress(artifact: CompressedArtifact) -> np.ndarray:
    """Reconstruct exactly ``n_values`` float32 values, bit-identical to the
    compressor's in-loop reconstructed stream."""
    artifact._check_consistency()
    p = artifact.params
    table = huffman.HuffmanTable(artifact.table_symbols.astype(np.int64),
                                 artifact.table_lengths)
    symbols = huffman.decode(artifact.payload, artifact.payload_bits,
                             artifact.n_values, table)
    codes = np.where(symbols == p.intervals, -1, symbols).astype(np.int32)
    if int((codes < 0).sum()) != artifact.unpredictable_count:
        raise CorruptStreamError("corrupt stream: unpredictable section")
    unpred = np.frombuffer(artifact.unpredictable, dtype="<f4").astype(np.float32)
    eb = artifact.resolved_abs
    if p.predictor == "sz-pm":
        mask = bitpack.unpack_bits(artifact.predmd, artifact.n_sequences)
        offsets = np.full(artifact.n_sequences, -1, dtype=np.int32)
        if artifact.matched_count:
            offs = bitpack.unpack_uints(artifact.offsets, p.offset_bits,
                                        artifact.matched_count)
            offsets[mask == 0] = offs.astype(np.int32)
        means = np.zeros(artifact.n_sequences, dtype=np.float32)
        if artifact.matched_count:
            means[mask == 0] = np.frombuffer(artifact.means, dtype="<f4")
        return kernels.pm_decode(codes, unpred, mask, offsets, means,
                                 p.m, p.n, eb, p.intervals)
    return kernels.lv_decode(codes, unpred, eb, p.intervals)


def inspect(artifact: CompressedArtifact):
    """Size breakdown of an artifact; see ``szpm.metrics.bit_accounting``."""
    from szpm import metrics

    return metrics.bit_accounting(artifact)
