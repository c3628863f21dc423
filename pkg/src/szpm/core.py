"""Core types, parameter validation, and error-bound arithmetic.

Arrays are plain 1-D ``numpy.float32`` buffers throughout the package;
``as_float_array`` is the single entry point that enforces that contract.
All value types here are immutable and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

PREDICTORS = ("sz-lv", "sz-sort", "sz-pm")

DEFAULT_INTERVALS = 511
DEFAULT_SEARCH_BUFFER = 1024
DEFAULT_LOOKAHEAD = 8
DEFAULT_P = 0.5

# table symbols are serialized as 16-bit values, which caps the interval count
MAX_INTERVALS = 65535


class ValidationError(ValueError):
    """Bad parameters or bad input data."""


class CorruptStreamError(ValueError):
    """A compressed artifact failed structural validation."""


def as_float_array(values) -> np.ndarray:
    """Coerce ``values`` to a contiguous 1-D float32 array.

    Rejects anything that is not one-dimensional and anything that holds (or
    overflows to) a NaN or infinity, since the error bound is meaningless for
    non-finite points.
    """
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValidationError("input must be one-dimensional")
    with np.errstate(over="ignore"):  # overflow to inf is caught just below
        arr = np.ascontiguousarray(arr, dtype=np.float32)
    if arr.size and not np.isfinite(arr).all():
        raise ValidationError("non-finite input")
    return arr


@dataclass(frozen=True)
class ErrorBound:
    """Per-point error bound, either absolute or relative to the value range.

    ``resolved_abs`` is the absolute bound actually enforced; for relative
    bounds it is ``value * (max - min)`` of the array being compressed, with
    the bare ``value`` as fallback when the range is zero.
    """

    mode: str  # "abs" | "rel"
    value: float
    resolved_abs: float | None = None

    def __post_init__(self):
        if self.mode not in ("abs", "rel"):
            raise ValidationError(f"unknown error-bound mode {self.mode!r}")
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValidationError("error-bound value must be a positive finite number")
        if self.resolved_abs is not None and not (
            math.isfinite(self.resolved_abs) and self.resolved_abs > 0
        ):
            raise ValidationError("resolved error bound must be a positive finite number")


def resolve_error_bound(array, bound: ErrorBound) -> ErrorBound:
    """Return ``bound`` with ``resolved_abs`` computed against ``array``.

    Idempotent: resolving twice against the same array yields the same result.
    """
    arr = as_float_array(array)
    if arr.size == 0:
        raise ValidationError("empty input")
    if bound.mode == "abs":
        resolved = bound.value
    else:
        vrange = float(arr.max()) - float(arr.min())
        resolved = bound.value * vrange if vrange > 0 else bound.value
    return replace(bound, resolved_abs=resolved)


@dataclass(frozen=True)
class CompressionParams:
    """Everything the codec needs besides the data itself.

    ``theta=None`` means "use the default of 0.5 * m"; ``validate_params``
    fills it in. ``theta`` may be 0 (pattern matching never fires) or
    ``inf`` (always fires once enough history exists).
    """

    error_bound: ErrorBound
    predictor: str = "sz-lv"
    intervals: int = DEFAULT_INTERVALS
    m: int = DEFAULT_SEARCH_BUFFER
    n: int = DEFAULT_LOOKAHEAD
    p: float = DEFAULT_P
    theta: float | None = None
    final_lz77: bool = False

    @property
    def center_code(self) -> int:
        return (self.intervals - 1) // 2

    @property
    def offset_bits(self) -> int:
        """Width of one stored match offset: ceil(log2(m))."""
        return (self.m - 1).bit_length()


def validate_params(params: CompressionParams) -> CompressionParams:
    """Check every invariant and fill defaults; returns the validated params."""
    if params.predictor not in PREDICTORS:
        raise ValidationError(
            f"unknown predictor {params.predictor!r}; expected one of {PREDICTORS}"
        )
    if not isinstance(params.intervals, int) or params.intervals < 1:
        raise ValidationError("intervals must be a positive integer")
    if params.intervals % 2 == 0:
        raise ValidationError("intervals must be odd")
    if params.intervals > MAX_INTERVALS:
        raise ValidationError(f"intervals must be <= {MAX_INTERVALS}")
    if not isinstance(params.m, int) or params.m < 1:
        raise ValidationError("search buffer size m must be a positive integer")
    if not isinstance(params.n, int) or params.n < 1:
        raise ValidationError("look-ahead size n must be a positive integer")
    if params.n > params.m:
        raise ValidationError("look-ahead exceeds search buffer")
    if not (math.isfinite(params.p) and params.p > 0):
        raise ValidationError("Lp exponent p must be a positive finite number")
    theta = params.theta
    if theta is None:
        theta = 0.5 * params.m
    if math.isnan(theta) or theta < 0:
        raise ValidationError("match threshold theta must be >= 0 (inf allowed)")
    # resolve the bound's own invariants early; resolved_abs is filled at
    # compression time against the actual array
    ErrorBound(params.error_bound.mode, params.error_bound.value,
               params.error_bound.resolved_abs)
    return replace(params, theta=float(theta))


@dataclass(frozen=True)
class PmRecord:
    """Per-sequence side information: prediction mode, and for matched
    sequences the candidate offset plus the float32-rounded sequence mean."""

    predmd: int  # 0 = pattern-matched, 1 = last-value fallback
    offset: int | None = None
    mean: float | None = None

    def __post_init__(self):
        if self.predmd not in (0, 1):
            raise ValidationError("predmd must be 0 or 1")
        if self.predmd == 0 and (self.offset is None or self.mean is None):
            raise ValidationError("matched record requires offset and mean")
        if self.offset is not None and self.offset < 0:
            raise ValidationError("offset must be non-negative")
