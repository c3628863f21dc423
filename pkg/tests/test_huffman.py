import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from szpm.core import CorruptStreamError, ValidationError
from szpm.huffman import HuffmanTable, build_table, decode, encode


def empirical_entropy(codes):
    counts = np.bincount(np.asarray(codes))
    probs = counts[counts > 0] / len(codes)
    return float(-(probs * np.log2(probs)).sum())


def optimal_prefix_bits(freqs):
    """Brute-force minimum prefix-code size for small alphabets.

    Enumerates non-decreasing length vectors satisfying Kraft and pairs them
    with descending frequencies (rearrangement argument), lengths >= 1.
    """
    freqs = sorted(freqs, reverse=True)
    k = len(freqs)
    best = math.inf
    for lens in itertools.combinations_with_replacement(range(1, k + 1), k):
        if sum(2 ** -l for l in lens) > 1:
            continue
        cost = sum(f * l for f, l in zip(freqs, lens))
        best = min(best, cost)
    return best


def test_single_symbol_gets_one_bit():
    table = build_table([42] * 10)
    assert table.symbols.tolist() == [42]
    assert table.lengths.tolist() == [1]
    payload, nbits = encode([42, 42, 42], table)
    assert nbits == 3
    assert decode(payload, nbits, 3, table).tolist() == [42, 42, 42]


def test_two_symbol_tree():
    table = build_table([0, 0, 0, 7])
    assert sorted(table.lengths.tolist()) == [1, 1]


def test_empty_stream_round_trips():
    table = build_table([1, 2])
    payload, nbits = encode([], table)
    assert payload == b"" and nbits == 0
    assert decode(payload, 0, 0, table).tolist() == []


def test_build_table_rejects_empty():
    with pytest.raises(ValidationError, match="empty input"):
        build_table([])


def test_unknown_symbol_rejected():
    table = build_table([1, 2, 2])
    with pytest.raises(ValidationError, match="unknown symbol"):
        encode([3], table)


def test_truncated_payload_raises():
    rng = np.random.default_rng(0)
    codes = rng.integers(0, 16, 500)
    table = build_table(codes)
    payload, nbits = encode(codes, table)
    with pytest.raises(CorruptStreamError, match="corrupt stream"):
        decode(payload[:-2], nbits, 500, table)
    with pytest.raises(CorruptStreamError, match="corrupt stream"):
        decode(payload, nbits - 8, 500, table)


def test_prefix_free_and_kraft():
    rng = np.random.default_rng(1)
    codes = rng.geometric(0.3, 4000) % 64
    table = build_table(codes)
    lens = table.lengths.astype(int)
    assert sum(2.0 ** -l for l in lens) <= 1.0 + 1e-12
    words = [(int(table.enc_code[s]), int(table.enc_len[s])) for s in table.symbols]
    for (c1, l1), (c2, l2) in itertools.permutations(words, 2):
        if l1 <= l2:
            assert (c2 >> (l2 - l1)) != c1, "prefix violation"


def test_encode_within_entropy_plus_one():
    rng = np.random.default_rng(2)
    for dist in ("uniform", "geometric", "laplace"):
        if dist == "uniform":
            codes = rng.integers(0, 97, 50_000)
        elif dist == "geometric":
            codes = rng.geometric(0.2, 50_000) % 128
        else:
            codes = np.clip(np.round(rng.laplace(64, 6, 50_000)), 0, 127).astype(int)
        table = build_table(codes)
        _, nbits = encode(codes, table)
        H = empirical_entropy(codes)
        assert nbits <= len(codes) * (H + 1) + 1e-6


def test_matches_brute_force_optimum_small_alphabets():
    rng = np.random.default_rng(3)
    for _ in range(120):
        k = int(rng.integers(2, 9))
        freqs = rng.integers(1, 50, k)
        codes = np.repeat(np.arange(k), freqs)
        table = build_table(codes)
        assert table.bit_length_of(codes) == optimal_prefix_bits(freqs.tolist())


def test_concentrated_beats_uniform():
    rng = np.random.default_rng(4)
    support = 32
    uniform = rng.integers(0, support, 20_000)
    concentrated = np.clip(np.round(rng.laplace(16, 1.0, 20_000)), 0, support - 1).astype(int)
    # identical support so the comparison is fair
    concentrated[:support] = np.arange(support)
    bits_u = encode(uniform, build_table(uniform))[1]
    bits_c = encode(concentrated, build_table(concentrated))[1]
    assert bits_c / len(concentrated) < bits_u / len(uniform)


def test_round_trip_laplace_stream():
    rng = np.random.default_rng(5)
    codes = np.clip(np.round(rng.laplace(255, 3, 100_000)), 0, 510).astype(np.int64)
    table = build_table(codes)
    payload, nbits = encode(codes, table)
    out = decode(payload, nbits, len(codes), table)
    assert np.array_equal(out, codes)


def test_deterministic_tables():
    codes = [5, 5, 9, 9, 1, 1, 3]  # weight ties force tie-breaking
    t1, t2 = build_table(codes), build_table(codes)
    assert t1.symbols.tolist() == t2.symbols.tolist()
    assert t1.lengths.tolist() == t2.lengths.tolist()
    assert encode(codes, t1) == encode(codes, t2)


def test_table_reconstruction_matches_builder():
    rng = np.random.default_rng(6)
    codes = rng.integers(0, 300, 5000)
    built = build_table(codes)
    rebuilt = HuffmanTable(built.symbols.copy(), built.lengths.copy())
    payload, nbits = encode(codes, built)
    assert np.array_equal(decode(payload, nbits, len(codes), rebuilt), codes)


def test_malformed_table_rejected():
    with pytest.raises(CorruptStreamError):
        HuffmanTable(np.array([1, 1]), np.array([1, 1]))  # duplicate symbol
    with pytest.raises(CorruptStreamError):
        HuffmanTable(np.array([1, 2, 3]), np.array([1, 1, 1]))  # Kraft > 1
    with pytest.raises(CorruptStreamError):
        HuffmanTable(np.array([1]), np.array([0]))  # zero length


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=1, max_size=300))
def test_round_trip_property(codes):
    table = build_table(codes)
    payload, nbits = encode(codes, table)
    assert decode(payload, nbits, len(codes), table).tolist() == codes
