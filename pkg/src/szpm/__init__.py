"""Error-bounded lossy compression for 1-D float32 arrays.

Three predictors share one pipeline (predict, quantize residuals under a
hard per-point bound, Huffman-code the quantization codes, store the rest
verbatim): plain last-value (``sz-lv``), last-value over per-segment-sorted
data (``sz-sort``), and sliding-window pattern matching over reconstructed
history (``sz-pm``).
"""

from szpm.codec import CompressedArtifact, compress, decompress, inspect, reference_stream
from szpm.core import (
    CompressionParams,
    CorruptStreamError,
    ErrorBound,
    PmRecord,
    ValidationError,
    as_float_array,
    resolve_error_bound,
    validate_params,
)
from szpm.metrics import SizeBreakdown, bit_accounting, code_histogram, verify_error_bound

__version__ = "0.1.0"

__all__ = [
    "CompressedArtifact",
    "CompressionParams",
    "CorruptStreamError",
    "ErrorBound",
    "PmRecord",
    "SizeBreakdown",
    "ValidationError",
    "as_float_array",
    "bit_accounting",
    "code_histogram",
    "compress",
    "decompress",
    "inspect",
    "reference_stream",
    "resolve_error_bound",
    "validate_params",
    "verify_error_bound",
    "__version__",
]
