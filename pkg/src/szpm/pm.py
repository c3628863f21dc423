"""Sliding-window pattern matching over reconstructed history.

A window pairs the last ``m`` reconstructed values (the search buffer) with
the next ``n`` raw values (the look-ahead). Every n-long candidate window of
the search buffer competes after being independently sorted and shifted by
its own float32-rounded mean; the look-ahead is transformed the same way, so
a candidate that is a permutation of the look-ahead plus a constant offset
scores distance zero. The decompressor rebuilds candidates from the same
reconstructed history, so a match is fully described by (offset, mean).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from szpm import kernels
from szpm.core import CompressionParams, PmRecord, ValidationError
from szpm.quantize import quantize_residual


@dataclass(frozen=True)
class SlidingWindow:
    """Search buffer (reconstructed values, most recent last) plus look-ahead
    (raw values awaiting prediction)."""

    search: np.ndarray
    lookahead: np.ndarray


@dataclass(frozen=True)
class ShiftedSequence:
    """A sequence after sorting ascending and subtracting its float32 mean."""

    values: np.ndarray
    mean: np.float32


def _seq_mean32(sorted_values) -> np.float32:
    total = 0.0
    for v in sorted_values:
        total += float(v)
    return np.float32(total / len(sorted_values))


def shift_sequence(values) -> ShiftedSequence:
    """Sort ascending, then subtract the float32-rounded mean."""
    arr = np.sort(np.asarray(values, dtype=np.float32), kind="stable")
    if arr.size == 0:
        raise ValidationError("empty input")
    mean32 = _seq_mean32(arr)
    return ShiftedSequence(arr.astype(np.float64) - float(mean32), mean32)


def lp_distance(a, b, p: float) -> float:
    """``(sum |a_i - b_i|^p) ^ (1/p)`` with terms accumulated in index order."""
    a = np.asarray(getattr(a, "values", a), dtype=np.float64)
    b = np.asarray(getattr(b, "values", b), dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError("length mismatch")
    if not (math.isfinite(p) and p > 0):
        raise ValidationError("Lp exponent p must be a positive finite number")
    total = 0.0
    for x, y in zip(a, b):
        d = abs(float(x) - float(y))
        if p == 0.5:
            total += math.sqrt(d)
        elif p == 1.0:
            total += d
        elif p == 2.0:
            total += d * d
        else:
            total += math.pow(d, p)
    return total ** (1.0 / p)


@dataclass(frozen=True)
class MatchResult:
    """Outcome of one candidate scan. ``offset`` indexes the candidate start
    within the search buffer (0 = oldest); ties go to the smallest offset."""

    matched: bool
    offset: int | None
    distance: float


def find_best_match(window: SlidingWindow, params: CompressionParams) -> MatchResult:
    """Scan all candidate windows for the look-ahead's best match.

    Fewer than ``n`` search values means no candidates: returns an unmatched
    result with infinite distance. ``matched`` requires distance strictly
    below theta, so theta = 0 never matches.
    """
    search = np.asarray(window.search, dtype=np.float32)
    lookahead = np.asarray(window.lookahead, dtype=np.float32)
    n = len(lookahead)
    if n != params.n:
        raise ValidationError("look-ahead length does not match params.n")
    if len(search) < n:
        return MatchResult(False, None, math.inf)
    y = shift_sequence(lookahead)
    best_j, best_sum = kernels.pm_scan(search, y.values, params.p)
    distance = best_sum ** (1.0 / params.p)
    theta = params.theta if params.theta is not None else 0.5 * params.m
    return MatchResult(bool(distance < theta), int(best_j), float(distance))


def pm_predict(window: SlidingWindow, match: MatchResult):
    """Predictions for the sorted look-ahead from a matched candidate.

    ``predicted_i = candidate_sorted_i - mean(candidate) + mean(lookahead)``
    with both means rounded to float32 first; the look-ahead mean is exactly
    the value stored in the returned record, so decompression replays the
    identical arithmetic.
    """
    if not match.matched:
        raise ValidationError("no matched sequence; use the fallback predictor")
    search = np.asarray(window.search, dtype=np.float32)
    lookahead = np.asarray(window.lookahead, dtype=np.float32)
    n = len(lookahead)
    y = shift_sequence(lookahead)
    cand = np.sort(search[match.offset:match.offset + n], kind="stable")
    cmean32 = _seq_mean32(cand)
    preds = cand.astype(np.float64) - float(cmean32) + float(y.mean)
    return preds, PmRecord(predmd=0, offset=match.offset, mean=float(y.mean))


def pm_fallback_predict(lookahead, prev_recon, eb_abs, intervals=511):
    """Closed-loop last-value coding of the sorted look-ahead.

    ``prev_recon`` is the last reconstructed value before this sequence
    (None for the start of the array, which predicts 0). Returns
    ``(predictions, record, codes, reconstructed)``; predictions consume the
    reconstructed values as they are produced, exactly as the decompressor
    will replay them.
    """
    y = np.sort(np.asarray(lookahead, dtype=np.float32), kind="stable")
    preds = np.empty(len(y), dtype=np.float64)
    codes = []
    recon = np.empty(len(y), dtype=np.float32)
    prev = 0.0 if prev_recon is None else float(prev_recon)
    for i in range(len(y)):
        preds[i] = prev
        code, rec = quantize_residual(y[i], prev, eb_abs, intervals)
        codes.append(code)
        recon[i] = rec
        prev = float(rec)
    return preds, PmRecord(predmd=1), codes, recon
