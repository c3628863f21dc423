"""Benchmark comparing the compiled and pure kernel backends.

Runs each predictor over the synthetic corpora with both backends (when the
compiled module is built), checks that the artifacts are byte-identical, and
prints throughput side by side. Run with ``python -m szpm.bench``.
"""

from __future__ import annotations

import argparse
import time

from szpm import codec, kernels, synth
from szpm.core import CompressionParams, ErrorBound


def _time_once(fn):
    t0 = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - t0


def run(count: int = 200_000, seed: int = 0) -> int:
    corpora = {
        "gaussian": synth.gaussian(count, seed=seed),
        "planted": synth.planted_patterns(count, seed=seed),
    }
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}   points per array: {count}")
    header = f"{'corpus':<10} {'predictor':<8} {'backend':<7} " \
             f"{'compress MB/s':>13} {'decompress MB/s':>15} {'ratio':>7}"
    print(header)
    print("-" * len(header))
    previous = kernels.get_backend()
    try:
        for corpus_name, data in corpora.items():
            for predictor in ("sz-lv", "sz-sort", "sz-pm"):
                params = CompressionParams(error_bound=ErrorBound("rel", 1e-4),
                                           predictor=predictor)
                blobs = {}
                for backend in backends:
                    kernels.set_backend(backend)
                    artifact, dt_c = _time_once(lambda: codec.compress(data, params))
                    _, dt_d = _time_once(lambda: codec.decompress(artifact))
                    blobs[backend] = artifact.to_bytes()
                    mb = data.nbytes / 1e6
                    ratio = data.nbytes / len(blobs[backend])
                    print(f"{corpus_name:<10} {predictor:<8} {backend:<7} "
                          f"{mb / dt_c:>13.1f} {mb / dt_d:>15.1f} {ratio:>7.2f}")
                if len(blobs) == 2 and blobs["pure"] != blobs["native"]:
                    print("  !! backend outputs differ — kernel contract violated")
                    return 1
    finally:
        kernels.set_backend(previous)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    return run(args.count, args.seed)


if __name__ == "__main__":
    raise SystemExit(main())
