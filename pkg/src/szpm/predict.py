"""Last-value prediction and the per-segment sorting transform.

Segment sorting reorders values within consecutive n-point spans only; the
output stream is what gets compressed and what decompression reproduces,
which is allowed because element order inside one array carries no meaning
for this data. Error verification therefore compares against the
segment-sorted original.
"""

from __future__ import annotations

import numpy as np

from szpm.core import ValidationError, as_float_array


def segment_sort(values, n: int) -> np.ndarray:
    """Sort each consecutive span of ``n`` values ascending (trailing partial
    span included). Returns a new array; per-span multisets are preserved."""
    if n < 1:
        raise ValidationError("segment size must be >= 1")
    arr = as_float_array(values).copy()
    full = (arr.size // n) * n
    if full:
        arr[:full].reshape(-1, n).sort(axis=1, kind="stable")
    if full < arr.size:
        arr[full:].sort(kind="stable")
    return arr


def predict_last_value(history, index: int) -> float:
    """Predict point ``index`` from the previous reconstructed value.

    Index 0 is predicted as 0.0 by convention (no side channel needed).
    ``history`` must be reconstructed values, never originals, so the
    decompressor can replay the same predictions.
    """
    if index < 0:
        raise ValidationError("index must be >= 0")
    if index == 0:
        return 0.0
    return float(history[index - 1])
