"""Command-line front end: compress, decompress, inspect, verify, gen, compare.

Raw array files are headerless little-endian float32; the artifact format is
documented in ``szpm.codec``. Exit status 0 means success (and, for verify,
that the bound held); any failure exits 1 with a message on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from szpm import codec, metrics, synth
from szpm.core import (
    CompressionParams,
    CorruptStreamError,
    ErrorBound,
    ValidationError,
    as_float_array,
)


def read_raw(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) % 4:
        raise ValidationError(f"malformed raw array: {path} size is not a multiple of 4")
    return np.frombuffer(buf, dtype="<f4").astype(np.float32)


def write_raw(path: str, values) -> None:
    as_float_array(values).astype("<f4").tofile(path)


def params_from_args(args) -> CompressionParams:
    if args.eb_rel is not None:
        bound = ErrorBound("rel", args.eb_rel)
    else:
        bound = ErrorBound("abs", args.eb_abs)
    return CompressionParams(
        error_bound=bound,
        predictor=args.predictor,
        intervals=args.intervals,
        m=args.m,
        n=args.n,
        p=args.p,
        theta=args.theta,
        final_lz77=getattr(args, "final_lz77", False),
    )


def _add_param_flags(sub, include_lz77=True):
    sub.add_argument("--predictor", choices=("sz-lv", "sz-sort", "sz-pm"),
                     default="sz-lv")
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--eb-rel", type=float, default=None,
                       help="value-range-relative error bound")
    group.add_argument("--eb-abs", type=float, default=None,
                       help="absolute error bound")
    sub.add_argument("--intervals", type=int, default=511)
    sub.add_argument("--m", type=int, default=1024, help="search buffer size")
    sub.add_argument("--n", type=int, default=8,
                     help="look-ahead / segment size")
    sub.add_argument("--p", type=float, default=0.5, help="Lp exponent")
    sub.add_argument("--theta", type=float, default=None,
                     help="match threshold (default 0.5 * m)")
    if include_lz77:
        sub.add_argument("--final-lz77", action="store_true",
                         help="wrap the container sections in a final LZ77 pass")


def _emit_breakdown(breakdown, label, report, out=None):
    out = out if out is not None else sys.stdout
    row = metrics.breakdown_row(label, breakdown)
    if report == "json":
        out.write(json.dumps(breakdown.to_dict(), indent=2) + "\n")
    elif report == "csv":
        out.write(metrics.rows_to_csv([row]))
    else:
        out.write(breakdown.format_text() + "\n")


def cmd_compress(args) -> int:
    data = read_raw(args.input)
    artifact = codec.compress(data, params_from_args(args))
    blob = artifact.to_bytes()
    with open(args.output, "wb") as fh:
        fh.write(blob)
    _emit_breakdown(metrics.bit_accounting(artifact), args.predictor, args.report)
    return 0


def cmd_decompress(args) -> int:
    with open(args.input, "rb") as fh:
        artifact = codec.CompressedArtifact.from_bytes(fh.read())
    write_raw(args.output, codec.decompress(artifact))
    return 0


def cmd_inspect(args) -> int:
    with open(args.input, "rb") as fh:
        artifact = codec.CompressedArtifact.from_bytes(fh.read())
    _emit_breakdown(codec.inspect(artifact), artifact.params.predictor, args.report)
    if args.histogram_csv:
        hist = metrics.code_histogram(artifact)
        with open(args.histogram_csv, "w") as fh:
            fh.write(metrics.histogram_to_csv(hist))
    return 0


def cmd_verify(args) -> int:
    params = params_from_args(args)
    original = read_raw(args.original)
    decompressed = read_raw(args.decompressed)
    reference = codec.reference_stream(original, params)
    result = metrics.verify_error_bound(reference, decompressed, params)
    status = "PASS" if result.ok else "FAIL"
    print(f"{status} max |error| {result.max_abs_error:.6g} "
          f"(bound {result.bound:.6g}, worst index {result.worst_index})")
    return 0 if result.ok else 1


def cmd_gen(args) -> int:
    if args.kind == "gaussian":
        data = synth.gaussian(args.count, args.mu, args.sigma, args.seed)
    elif args.kind == "mixture":
        data = synth.mixture(args.count, args.mu, args.sigma, args.seed)
    else:
        data = synth.planted_patterns(args.count, args.pattern_len,
                                      args.repeat_prob, args.noise_sigma,
                                      args.seed)
    write_raw(args.output, data)
    return 0


def _parse_config(text: str):
    """Config syntax: 'sz-pm(8)', 'sz-sort:16', or bare 'sz-lv'."""
    label = text.strip()
    name = label
    n = None
    if "(" in label and label.endswith(")"):
        name, _, rest = label.partition("(")
        n = int(rest[:-1])
    elif ":" in label:
        name, _, rest = label.partition(":")
        n = int(rest)
    name = name.strip()
    if name not in ("sz-lv", "sz-sort", "sz-pm"):
        raise ValidationError(f"unknown compare config {text!r}")
    return label, name, n


def cmd_compare(args) -> int:
    data = read_raw(args.input)
    rows = []
    for text in args.configs.split(","):
        label, name, n = _parse_config(text)
        ns = argparse.Namespace(**vars(args))
        ns.predictor = name
        if n is not None:
            ns.n = n
        artifact = codec.compress(data, params_from_args(ns))
        rows.append(metrics.breakdown_row(label, metrics.bit_accounting(artifact)))
    if args.report == "json":
        sys.stdout.write(metrics.rows_to_json(rows) + "\n")
    elif args.report == "csv":
        sys.stdout.write(metrics.rows_to_csv(rows))
    else:
        sys.stdout.write(metrics.rows_to_text(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="szpm",
        description="Error-bounded lossy compression for raw float32 arrays.")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compress", help="compress a raw float32 file")
    c.add_argument("input")
    c.add_argument("output")
    _add_param_flags(c)
    c.add_argument("--report", choices=("text", "json", "csv"), default="text")
    c.set_defaults(func=cmd_compress)

    d = sub.add_parser("decompress", help="decompress an artifact to a raw file")
    d.add_argument("input")
    d.add_argument("output")
    d.set_defaults(func=cmd_decompress)

    i = sub.add_parser("inspect", help="print the size breakdown of an artifact")
    i.add_argument("input")
    i.add_argument("--report", choices=("text", "json", "csv"), default="text")
    i.add_argument("--histogram-csv", default=None,
                   help="also write the quantization-code histogram as CSV")
    i.set_defaults(func=cmd_inspect)

    v = sub.add_parser("verify", help="check a decompressed file against the original")
    v.add_argument("original")
    v.add_argument("decompressed")
    _add_param_flags(v, include_lz77=False)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="generate a deterministic synthetic raw file")
    g.add_argument("output")
    g.add_argument("--kind", choices=("gaussian", "mixture", "planted"),
                   default="gaussian")
    g.add_argument("--count", type=int, default=100000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mu", type=float, default=0.0)
    g.add_argument("--sigma", type=float, default=1.0)
    g.add_argument("--pattern-len", type=int, default=32)
    g.add_argument("--repeat-prob", type=float, default=0.85)
    g.add_argument("--noise-sigma", type=float, default=0.45)
    g.set_defaults(func=cmd_gen)

    cp = sub.add_parser("compare", help="run several configs and tabulate one row each")
    cp.add_argument("input")
    cp.add_argument("--configs",
                    default="sz-sort(8),sz-pm(8),sz-sort(16),sz-pm(16),sz-sort(32),sz-pm(32)")
    _add_param_flags(cp)
    cp.add_argument("--report", choices=("text", "json", "csv"), default="text")
    cp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, CorruptStreamError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
