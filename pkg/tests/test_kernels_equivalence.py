"""The two kernel backends must agree bit for bit on everything observable."""

import numpy as np
import pytest

from szpm import codec, kernels, synth
from szpm.huffman import build_table
from tests.conftest import make_params

pytestmark = pytest.mark.skipif(
    "native" not in kernels.available_backends(),
    reason="compiled kernels not built")


@pytest.fixture
def both_backends():
    def run(fn):
        results = {}
        previous = kernels.get_backend()
        try:
            for backend in ("pure", "native"):
                kernels.set_backend(backend)
                results[backend] = fn()
        finally:
            kernels.set_backend(previous)
        return results["pure"], results["native"]

    return run


def test_lv_encode_decode_identical(both_backends):
    rng = np.random.default_rng(0)
    data = rng.normal(0, 100, 30_000).astype(np.float32)

    pure, native = both_backends(lambda: kernels.lv_encode(data, 0.01, 511))
    assert np.array_equal(pure[0], native[0])
    assert np.array_equal(pure[1].view(np.uint32), native[1].view(np.uint32))

    codes, recon = native
    unpred = data[codes < 0]
    pure_d, native_d = both_backends(lambda: kernels.lv_decode(codes, unpred, 0.01, 511))
    assert np.array_equal(pure_d.view(np.uint32), native_d.view(np.uint32))


def test_pm_scan_identical(both_backends):
    rng = np.random.default_rng(1)
    for _ in range(400):
        n = int(rng.integers(2, 33))
        L = int(rng.integers(n, 200))
        search = rng.normal(0, 50, L).astype(np.float32)
        y = np.sort(rng.normal(0, 50, n).astype(np.float32))
        total = 0.0
        for v in y:
            total += float(v)
        ysh = y.astype(np.float64) - float(np.float32(total / n))
        p = float(rng.choice([0.5, 1.0, 2.0, 0.3, 3.0]))
        pure, native = both_backends(lambda: kernels.pm_scan(search, ysh, p))
        assert pure == native


def test_pm_encode_identical(both_backends):
    from szpm.predict import segment_sort

    data = segment_sort(synth.planted_patterns(20_000, seed=2), 8)
    pure, native = both_backends(
        lambda: kernels.pm_encode(data, 1024, 8, 0.5, 512.0, 0.05, 511))
    for a, b in zip(pure, native):
        if a.dtype == np.float32:
            assert np.array_equal(a.view(np.uint32), b.view(np.uint32))
        else:
            assert np.array_equal(a, b)


def test_full_artifacts_byte_identical(both_backends):
    for kind in ("gaussian", "mixture", "planted"):
        data = synth.GENERATORS[kind](15_000, seed=3)
        for predictor in ("sz-lv", "sz-sort", "sz-pm"):
            params = make_params(predictor, eb_rel=1e-4, n=16)
            pure, native = both_backends(
                lambda: codec.compress(data, params).to_bytes())
            assert pure == native
            blob = native
            pure_out, native_out = both_backends(
                lambda: codec.decompress(codec.CompressedArtifact.from_bytes(blob)))
            assert np.array_equal(pure_out.view(np.uint32),
                                  native_out.view(np.uint32))


def test_huffman_bits_identical(both_backends):
    rng = np.random.default_rng(4)
    codes = np.clip(np.round(rng.laplace(255, 4, 60_000)), 0, 510).astype(np.int64)
    table = build_table(codes)
    pure, native = both_backends(
        lambda: kernels.huffman_encode(codes, table.enc_len, table.enc_code))
    assert pure == native
    payload, nbits = native
    pure_d, native_d = both_backends(
        lambda: kernels.huffman_decode(payload, nbits, len(codes), table.first,
                                       table.counts, table.offsets,
                                       table.canon_symbols, table.max_len))
    assert np.array_equal(pure_d, native_d)
    assert np.array_equal(native_d, codes)


def test_lz77_tokens_identical(both_backends):
    rng = np.random.default_rng(5)
    blobs = [
        bytes(rng.integers(0, 5, 20_000, dtype=np.uint8)),
        bytes(rng.integers(0, 256, 8_000, dtype=np.uint8)),
        b"abcabcabc" * 500,
        b"\x00" * 5_000,
    ]
    for blob in blobs:
        pure, native = both_backends(lambda: kernels.lz77_encode(blob, 1024, 32))
        for a, b in zip(pure, native):
            assert np.array_equal(a, b)
        offs, lens, nxts = native
        pure_d, native_d = both_backends(lambda: kernels.lz77_decode(offs, lens, nxts))
        assert pure_d == native_d == blob
