"""Bit accounting, histograms, and point-wise error verification.

All size components are measured in exact bits from the artifact itself:
Huffman payload bits, one predmd bit per sequence, ``offset_bits`` per
matched sequence, 32 bits per stored mean, 32 bits per unpredictable value.
The header component absorbs everything else (fixed header, Huffman table,
section framing, byte padding), so the components always sum to the overall
size exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from szpm import huffman
from szpm.core import ValidationError, as_float_array, resolve_error_bound

BREAKDOWN_COLUMNS = (
    "label", "quant_codes", "predmd", "pm_ratio", "offsets", "means",
    "unpredictable", "header", "overall", "compression_ratio",
)


@dataclass(frozen=True)
class SizeBreakdown:
    """Per-component sizes for one artifact, in raw bits and bits/value."""

    n_values: int
    n_sequences: int
    matched_sequences: int
    predictable_points: int
    unpredictable_points: int
    quant_code_bits: int
    predmd_bits: int
    offset_bits: int
    mean_bits: int
    unpredictable_bits: int
    header_bits: int
    total_bits: int

    @property
    def pm_ratio(self) -> float:
        if self.n_sequences == 0:
            return 0.0
        return self.matched_sequences / self.n_sequences

    @property
    def quant_codes(self) -> float:
        return self.quant_code_bits / self.n_values

    @property
    def predmd(self) -> float:
        return self.predmd_bits / self.n_values

    @property
    def offsets(self) -> float:
        return self.offset_bits / self.n_values

    @property
    def means(self) -> float:
        return self.mean_bits / self.n_values

    @property
    def unpredictable(self) -> float:
        return self.unpredictable_bits / self.n_values

    @property
    def header(self) -> float:
        return self.header_bits / self.n_values

    @property
    def overall_bits_per_value(self) -> float:
        return self.total_bits / self.n_values

    @property
    def compression_ratio(self) -> float:
        return 32.0 / self.overall_bits_per_value

    def to_dict(self) -> dict:
        return {
            "n_values": self.n_values,
            "n_sequences": self.n_sequences,
            "matched_sequences": self.matched_sequences,
            "predictable_points": self.predictable_points,
            "unpredictable_points": self.unpredictable_points,
            "pm_ratio": self.pm_ratio,
            "bits_per_value": {
                "quant_codes": self.quant_codes,
                "predmd": self.predmd,
                "offsets": self.offsets,
                "means": self.means,
                "unpredictable": self.unpredictable,
                "header": self.header,
                "overall": self.overall_bits_per_value,
            },
            "total_bits": self.total_bits,
            "compression_ratio": self.compression_ratio,
        }

    def format_text(self) -> str:
        rows = [
            ("values", f"{self.n_values}"),
            ("quantization codes", f"{self.quant_codes:.2f} bits/value"),
            ("predmd flags", f"{self.predmd:.2f} bits/value"),
            ("match offsets", f"{self.offsets:.2f} bits/value"),
            ("sequence means", f"{self.means:.2f} bits/value"),
            ("unpredictable values", f"{self.unpredictable:.2f} bits/value"),
            ("header + table", f"{self.header:.2f} bits/value"),
            ("overall", f"{self.overall_bits_per_value:.2f} bits/value"),
            ("compression ratio", f"{self.compression_ratio:.2f}"),
            ("pm match ratio", f"{100.0 * self.pm_ratio:.1f}%"),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def bit_accounting(artifact) -> SizeBreakdown:
    """Measure every size component of an artifact in exact bits.

    Sizes describe the plain (unwrapped) container layout so that accounting
    stays comparable whether or not the final LZ77 pass ran.
    """
    n = artifact.n_values
    quant = artifact.payload_bits
    predmd = artifact.n_sequences
    offs = artifact.matched_count * artifact.params.offset_bits
    means = artifact.matched_count * 32
    unpred = artifact.unpredictable_count * 32
    total = artifact.logical_nbytes * 8
    header = total - (quant + predmd + offs + means + unpred)
    return SizeBreakdown(
        n_values=n,
        n_sequences=artifact.n_sequences,
        matched_sequences=artifact.matched_count,
        predictable_points=artifact.code_count,
        unpredictable_points=artifact.unpredictable_count,
        quant_code_bits=quant,
        predmd_bits=predmd,
        offset_bits=offs,
        mean_bits=means,
        unpredictable_bits=unpred,
        header_bits=header,
        total_bits=total,
    )


def side_channel_bits_per_value(offset_bits: int, pm_ratio: float, n: int):
    """Expected (offsets, means) bits/value from a measured match ratio."""
    return offset_bits * pm_ratio / n, 32.0 * pm_ratio / n


def code_histogram(artifact) -> np.ndarray:
    """Frequency of each quantization code over ``[0, intervals)``.

    The total equals the number of predictable points; escape symbols do not
    appear.
    """
    table = huffman.HuffmanTable(artifact.table_symbols.astype(np.int64),
                                 artifact.table_lengths)
    symbols = huffman.decode(artifact.payload, artifact.payload_bits,
                             artifact.n_values, table)
    codes = symbols[symbols != artifact.params.intervals]
    return np.bincount(codes, minlength=artifact.params.intervals).astype(np.int64)


def histogram_to_csv(hist) -> str:
    lines = ["code,count"]
    lines += [f"{code},{int(count)}" for code, count in enumerate(hist)]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VerifyResult:
    max_abs_error: float
    bound: float
    ok: bool
    worst_index: int


def verify_error_bound(original, decompressed, params) -> VerifyResult:
    """Point-wise check of ``|original - decompressed| <= resolved bound``.

    ``original`` must already carry the same segment-sort transform the codec
    applied (see ``szpm.codec.reference_stream``); the value range, and hence
    the resolved bound, is unchanged by that permutation.
    """
    orig = as_float_array(original)
    dec = as_float_array(decompressed)
    if orig.size != dec.size:
        raise ValidationError("length mismatch")
    if orig.size == 0:
        raise ValidationError("empty input")
    bound = resolve_error_bound(orig, params.error_bound).resolved_abs
    err = np.abs(orig.astype(np.float64) - dec.astype(np.float64))
    worst = int(np.argmax(err))
    max_err = float(err[worst])
    return VerifyResult(max_abs_error=max_err, bound=bound,
                        ok=bool(max_err <= bound), worst_index=worst)


def breakdown_row(label: str, breakdown: SizeBreakdown) -> dict:
    """One compare-table row in the fixed column order."""
    return {
        "label": label,
        "quant_codes": breakdown.quant_codes,
        "predmd": breakdown.predmd,
        "pm_ratio": breakdown.pm_ratio,
        "offsets": breakdown.offsets,
        "means": breakdown.means,
        "unpredictable": breakdown.unpredictable,
        "header": breakdown.header,
        "overall": breakdown.overall_bits_per_value,
        "compression_ratio": breakdown.compression_ratio,
    }


def rows_to_csv(rows) -> str:
    lines = [",".join(BREAKDOWN_COLUMNS)]
    for row in rows:
        cells = [str(row["label"])]
        cells += [f"{row[col]:.6g}" for col in BREAKDOWN_COLUMNS[1:]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def rows_to_json(rows) -> str:
    return json.dumps(list(rows), indent=2)


def rows_to_text(rows) -> str:
    """Compare table mirroring the usual bit-rate report layout: one row per
    config, '/' for components a predictor does not store."""
    headers = ["config", "quant", "predmd", "pm%", "offset", "mean",
               "unpred", "header", "overall", "ratio"]

    def fmt(row):
        has_pm = row["predmd"] > 0 or row["pm_ratio"] > 0
        return [
            str(row["label"]),
            f"{row['quant_codes']:.2f}",
            f"{row['predmd']:.2f}" if has_pm else "/",
            f"{100.0 * row['pm_ratio']:.1f}" if has_pm else "/",
            f"{row['offsets']:.2f}" if has_pm else "/",
            f"{row['means']:.2f}" if has_pm else "/",
            f"{row['unpredictable']:.2f}",
            f"{row['header']:.2f}",
            f"{row['overall']:.2f}",
            f"{row['compression_ratio']:.2f}",
        ]

    table = [headers] + [fmt(r) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
             for row in table]
    return "\n".join(lines) + "\n"
