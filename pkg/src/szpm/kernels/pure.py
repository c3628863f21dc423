"""Pure NumPy/Python implementation of the hot loops.

This module is the readable reference for the kernel contract; the compiled
backend in ``_native.pyx`` must reproduce every function here bit for bit.
The contract pins floating-point evaluation order:

* all residual/distance arithmetic runs in float64 on float32 inputs;
* sequence means are accumulated in ascending (sorted) index order and the
  result is rounded to float32 before it is subtracted or stored;
* Lp distance terms are accumulated in index order, with ``|d| ** p``
  evaluated as ``sqrt`` / identity / square for p = 1/2, 1, 2 and libm
  ``pow`` otherwise;
* candidate scans keep the first (smallest-offset) minimum.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from szpm.core import CorruptStreamError
from szpm.quantize import dequantize, quantize_residual

_F32 = np.float32
_F64 = np.float64


def _seq_mean32(sorted_values) -> np.float32:
    """Float32-rounded mean, accumulated sequentially over sorted values."""
    total = 0.0
    for v in sorted_values:
        total += float(v)
    return np.float32(total / len(sorted_values))


def _terms(absdiff: np.ndarray, p: float) -> np.ndarray:
    if p == 0.5:
        return np.sqrt(absdiff)
    if p == 1.0:
        return absdiff
    if p == 2.0:
        return absdiff * absdiff
    # numpy's vectorized pow can differ from libm by an ulp; the contract
    # pins libm pow, so take the scalar path for non-standard exponents
    return np.array([math.pow(v, p) for v in absdiff.tolist()], dtype=_F64)


def _quantize_block(values: np.ndarray, preds: np.ndarray, eb: float, intervals: int):
    """Vectorized twin of ``quantize_residual`` over a block of points."""
    intervals = int(intervals)
    center = (intervals - 1) // 2
    width = 2.0 * float(eb)
    vals64 = values.astype(_F64)
    steps = (vals64 - preds) / width
    absst = np.abs(steps)
    ok = np.isfinite(steps) & (absst <= intervals)
    krel = np.floor(absst + 0.5)
    krel = np.where(steps < 0, -krel, krel)
    code = center + krel
    ok &= (code >= 0) & (code < intervals)
    recon32 = (preds + krel * width).astype(_F32)
    ok &= np.isfinite(recon32)
    ok &= np.abs(vals64 - recon32.astype(_F64)) <= eb
    codes = np.where(ok, code, -1).astype(np.int32)
    recon = np.where(ok, recon32, values.astype(_F32))
    return codes, recon


def _lv_span(stream, codes, recon, start, stop, eb, intervals):
    """Closed-loop last-value coding of ``stream[start:stop]`` in place."""
    prev = 0.0 if start == 0 else float(recon[start - 1])
    for i in range(start, stop):
        code, rec = quantize_residual(stream[i], prev, eb, intervals)
        codes[i] = -1 if code is None else code
        recon[i] = rec
        prev = float(rec)


def lv_encode(values: np.ndarray, eb: float, intervals: int):
    """Closed-loop last-value coding of a whole stream.

    Returns ``(codes, recon)`` where ``codes`` is int32 with -1 marking
    unpredictable points and ``recon`` is the float32 reconstructed stream.
    """
    n = len(values)
    codes = np.empty(n, dtype=np.int32)
    recon = np.empty(n, dtype=_F32)
    _lv_span(values, codes, recon, 0, n, eb, intervals)
    return codes, recon


def lv_decode(codes: np.ndarray, unpred: np.ndarray, eb: float, intervals: int):
    """Replay of ``lv_encode`` from codes plus verbatim unpredictable values."""
    n = len(codes)
    recon = np.empty(n, dtype=_F32)
    prev = 0.0
    u = 0
    for i in range(n):
        c = codes[i]
        if c < 0:
            if u >= len(unpred):
                raise CorruptStreamError("corrupt stream: unpredictable section exhausted")
            rec = unpred[u]
            u += 1
        else:
            rec = dequantize(int(c), prev, eb, intervals)
        recon[i] = rec
        prev = float(rec)
    return recon


def pm_scan(search: np.ndarray, y_shift: np.ndarray, p: float):
    """Scan every n-window of ``search`` against a sorted, mean-shifted target.

    Each candidate is independently sorted and shifted by its own
    float32-rounded mean. Returns ``(offset, sum)`` of the smallest-offset
    minimal accumulated Lp sum (the distance is ``sum ** (1/p)``).
    """
    n = len(y_shift)
    if n < 1 or len(search) < n:
        raise ValueError("search buffer shorter than the look-ahead")
    wins = sliding_window_view(np.asarray(search, dtype=_F32), n)
    cand = np.sort(wins, axis=1, kind="stable").astype(_F64)
    acc = cand[:, 0].copy()
    for i in range(1, n):
        acc += cand[:, i]
    mean32 = (acc / n).astype(_F32).astype(_F64)
    total = None
    for i in range(n):
        t = _terms(np.abs((cand[:, i] - mean32) - y_shift[i]), p)
        total = t if total is None else total + t
    j = int(np.argmin(total))
    return j, float(total[j])


def pm_encode(stream: np.ndarray, m: int, n: int, p: float, theta: float,
              eb: float, intervals: int):
    """Pattern-matching coder over a block-sorted stream.

    ``stream`` must already be sorted within each n-point block. Full blocks
    get one record each; the trailing partial block falls back to last-value
    coding with no record. The search buffer is the last ``min(m, coded)``
    reconstructed values at block start.
    """
    N = len(stream)
    S = N // n
    codes = np.empty(N, dtype=np.int32)
    recon = np.empty(N, dtype=_F32)
    predmd = np.empty(S, dtype=np.uint8)
    offsets = np.full(S, -1, dtype=np.int32)
    means = np.zeros(S, dtype=_F32)
    inv_p = 1.0 / p
    for s in range(S):
        base = s * n
        block = stream[base:base + n]
        mean_y32 = _seq_mean32(block)
        L = min(m, base)
        matched = False
        best_j = -1
        if L >= n and theta > 0:
            y_shift = block.astype(_F64) - float(mean_y32)
            best_j, best_sum = pm_scan(recon[base - L:base], y_shift, p)
            matched = best_sum ** inv_p < theta
        if matched:
            cand = np.sort(recon[base - L + best_j:base - L + best_j + n], kind="stable")
            cmean32 = _seq_mean32(cand)
            preds = cand.astype(_F64) - float(cmean32) + float(mean_y32)
            bc, br = _quantize_block(block, preds, eb, intervals)
            codes[base:base + n] = bc
            recon[base:base + n] = br
            predmd[s] = 0
            offsets[s] = best_j
            means[s] = mean_y32
        else:
            predmd[s] = 1
            _lv_span(stream, codes, recon, base, base + n, eb, intervals)
    _lv_span(stream, codes, recon, S * n, N, eb, intervals)
    return codes, recon, predmd, offsets, means


def pm_decode(codes: np.ndarray, unpred: np.ndarray, predmd: np.ndarray,
              offsets: np.ndarray, means: np.ndarray, m: int, n: int,
              eb: float, intervals: int):
    """Replay of ``pm_encode`` from codes and per-sequence side information."""
    N = len(codes)
    S = len(predmd)
    intervals = int(intervals)
    center = (intervals - 1) // 2
    width = 2.0 * float(eb)
    recon = np.empty(N, dtype=_F32)
    u = 0

    def lv_replay(start, stop, u):
        prev = 0.0 if start == 0 else float(recon[start - 1])
        for i in range(start, stop):
            c = codes[i]
            if c < 0:
                if u >= len(unpred):
                    raise CorruptStreamError("corrupt stream: unpredictable section exhausted")
                rec = unpred[u]
                u += 1
            else:
                rec = dequantize(int(c), prev, eb, intervals)
            recon[i] = rec
            prev = float(rec)
        return u

    for s in range(S):
        base = s * n
        if predmd[s] != 0:
            u = lv_replay(base, base + n, u)
            continue
        L = min(m, base)
        j = int(offsets[s])
        if L < n or j < 0 or j > L - n:
            raise CorruptStreamError("corrupt stream: offsets section")
        cand = np.sort(recon[base - L + j:base - L + j + n], kind="stable")
        cmean32 = _seq_mean32(cand)
        preds = cand.astype(_F64) - float(cmean32) + float(means[s])
        block_codes = codes[base:base + n]
        bad = (block_codes >= intervals)
        if bad.any():
            raise CorruptStreamError("corrupt stream: quantization code out of range")
        rec64 = preds + (block_codes.astype(_F64) - center) * width
        rec32 = rec64.astype(_F32)
        for i in range(n):
            if block_codes[i] < 0:
                if u >= len(unpred):
                    raise CorruptStreamError("corrupt stream: unpredictable section exhausted")
                recon[base + i] = unpred[u]
                u += 1
            else:
                recon[base + i] = rec32[i]
    u = lv_replay(S * n, N, u)
    return recon


def huffman_encode(symbols: np.ndarray, enc_len: np.ndarray, enc_code: np.ndarray):
    """Concatenate per-symbol codewords MSB first; returns ``(bytes, nbits)``."""
    symbols = np.asarray(symbols, dtype=np.int64)
    if symbols.size == 0:
        return b"", 0
    lens = enc_len[symbols].astype(np.int64)
    codes = enc_code[symbols]
    total = int(lens.sum())
    starts = np.zeros(len(symbols), dtype=np.int64)
    np.cumsum(lens[:-1], out=starts[1:])
    bits = np.zeros(total, dtype=np.uint8)
    for b in range(int(lens.max())):
        sel = lens > b
        shift = (lens[sel] - 1 - b).astype(np.uint64)
        bits[starts[sel] + b] = ((codes[sel] >> shift) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits).tobytes(), total


def huffman_decode(buf: bytes, nbits: int, count: int, first: np.ndarray,
                   counts: np.ndarray, offs: np.ndarray, canon: np.ndarray,
                   max_len: int):
    """Canonical Huffman decode of exactly ``count`` symbols from ``nbits``."""
    if count == 0:
        if nbits != 0:
            raise CorruptStreamError("corrupt stream: huffman payload length mismatch")
        return np.zeros(0, dtype=np.int32)
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8))
    if nbits > len(bits):
        raise CorruptStreamError("corrupt stream: huffman payload truncated")
    out = np.empty(count, dtype=np.int32)
    pos = 0
    for k in range(count):
        code = 0
        length = 0
        while True:
            if pos >= nbits:
                raise CorruptStreamError("corrupt stream: huffman payload truncated")
            code = (code << 1) | int(bits[pos])
            pos += 1
            length += 1
            if length > max_len:
                raise CorruptStreamError("corrupt stream: invalid huffman codeword")
            idx = code - int(first[length])
            if 0 <= idx < int(counts[length]):
                out[k] = canon[int(offs[length]) + idx]
                break
    if pos != nbits:
        raise CorruptStreamError("corrupt stream: huffman payload length mismatch")
    return out


def lz77_encode(data: bytes, search_cap: int, lookahead_cap: int):
    """Greedy longest-match tokenizer; ties keep the smallest offset.

    Match length is capped at ``lookahead - 1`` so every token carries the
    following literal; the window advances by ``length + 1`` per token.
    ``bytes.find``/``rfind`` accelerate the scan; comparisons run against the
    original buffer, which is equivalent for overlapping matches because
    already-emitted output equals the input.
    """
    n = len(data)
    offs, lens, nxts = [], [], []
    pos = 0
    while pos < n:
        max_len = min(lookahead_cap, n - pos) - 1
        best_len = 0
        best_off = 0
        if max_len > 0:
            wstart = max(0, pos - search_cap)
            while best_len < max_len:
                target = data[pos:pos + best_len + 1]
                s = data.find(target, wstart, pos + best_len + 1)
                if s < 0 or s >= pos:
                    break
                length = best_len + 1
                while length < max_len and data[s + length] == data[pos + length]:
                    length += 1
                best_len = length
                best_off = pos - s
            if best_len > 0:
                # smallest offset among ties = right-most occurrence
                target = data[pos:pos + best_len]
                s = data.rfind(target, wstart, pos + best_len - 1)
                best_off = pos - s
        if best_len > 0:
            offs.append(best_off)
            lens.append(best_len)
            nxts.append(data[pos + best_len])
            pos += best_len + 1
        else:
            offs.append(0)
            lens.append(0)
            nxts.append(data[pos])
            pos += 1
    return (np.array(offs, dtype=np.uint32), np.array(lens, dtype=np.uint32),
            np.array(nxts, dtype=np.uint8))


def lz77_decode(offs: np.ndarray, lens: np.ndarray, nxts: np.ndarray) -> bytes:
    """Replay tokens; overlapping copies are resolved byte by byte."""
    out = bytearray()
    for k in range(len(offs)):
        off = int(offs[k])
        length = int(lens[k])
        if (off == 0) != (length == 0):
            raise CorruptStreamError("corrupt stream: lz77 token")
        if off:
            start = len(out) - off
            if start < 0:
                raise CorruptStreamError("corrupt stream: lz77 offset")
            for i in range(length):
                out.append(out[start + i])
        out.append(int(nxts[k]))
    return bytes(out)
