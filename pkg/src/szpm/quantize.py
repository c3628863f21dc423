"""Error-controlled linear quantization of prediction residuals.

The scalar functions here are the normative definition; both kernel backends
reproduce them bit for bit. A point quantizes to code
``center + round(residual / (2 * eb))`` (half away from zero) when that code
fits the interval range *and* the float32-rounded reconstruction still honors
the bound; otherwise the point is unpredictable and its original 32 bits are
kept verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from szpm.core import CorruptStreamError, ValidationError


@dataclass
class QuantizedStream:
    """Per-point quantization outcome for one array.

    ``codes`` holds one entry per predictable point, ``predictable_mask`` one
    bit per point (1 = quantized), and ``unpredictable_values`` the verbatim
    float32 originals for the 0-bits, in input order.
    """

    codes: np.ndarray
    predictable_mask: np.ndarray
    unpredictable_values: np.ndarray

    @classmethod
    def from_dense(cls, dense_codes: np.ndarray, values: np.ndarray) -> "QuantizedStream":
        """Build from a dense code array using -1 to mark unpredictable points."""
        dense_codes = np.asarray(dense_codes, dtype=np.int32)
        mask = (dense_codes >= 0).astype(np.uint8)
        return cls(
            codes=dense_codes[dense_codes >= 0],
            predictable_mask=mask,
            unpredictable_values=np.asarray(values, dtype=np.float32)[dense_codes < 0],
        )

    def check(self):
        ones = int(self.predictable_mask.sum())
        if ones != len(self.codes):
            raise ValidationError("mask/code count mismatch")
        if len(self.predictable_mask) - ones != len(self.unpredictable_values):
            raise ValidationError("mask/unpredictable count mismatch")


def quantize_residual(real, predicted, eb_abs, intervals=511):
    """Quantize one residual; returns ``(code or None, reconstructed)``.

    ``None`` means unpredictable: the caller stores ``real`` verbatim and the
    reconstruction is exact. For quantized points the reconstruction is
    ``float32(predicted + (code - center) * 2 * eb_abs)`` and is guaranteed to
    sit within ``eb_abs`` of ``real``.
    """
    intervals = int(intervals)
    center = (intervals - 1) // 2
    real_f = float(real)
    width = 2.0 * float(eb_abs)
    steps = (real_f - float(predicted)) / width
    if not math.isfinite(steps) or abs(steps) > intervals:
        return None, np.float32(real)
    krel = int(math.floor(abs(steps) + 0.5))
    if steps < 0:
        krel = -krel
    code = center + krel
    if code < 0 or code >= intervals:
        return None, np.float32(real)
    recon = np.float32(float(predicted) + krel * width)
    if not np.isfinite(recon) or abs(real_f - float(recon)) > eb_abs:
        return None, np.float32(real)
    return code, recon


def dequantize(code, predicted, eb_abs, intervals=511):
    """Invert ``quantize_residual`` for a stored code.

    Shared by compressor and decompressor so reconstructed values agree bit
    for bit on both sides.
    """
    intervals = int(intervals)
    if code < 0 or code >= intervals:
        raise CorruptStreamError("corrupt stream: quantization code out of range")
    center = (intervals - 1) // 2
    return np.float32(float(predicted) + (int(code) - center) * (2.0 * float(eb_abs)))
