import math

import numpy as np
import pytest

from szpm import kernels
from szpm.core import ValidationError
from szpm.pm import (
    MatchResult,
    SlidingWindow,
    find_best_match,
    lp_distance,
    pm_fallback_predict,
    pm_predict,
    shift_sequence,
)
from tests.conftest import make_params


def oracle_scan(search, y_shift, p):
    """Exhaustive candidate enumeration in plain Python."""
    n = len(y_shift)
    best_j, best_sum = 0, math.inf
    for j in range(len(search) - n + 1):
        cand = sorted(float(v) for v in search[j:j + n])
        total = 0.0
        for v in cand:
            total += v
        m32 = float(np.float32(total / n))
        dist = 0.0
        for i in range(n):
            d = abs((cand[i] - m32) - float(y_shift[i]))
            if p == 0.5:
                dist += math.sqrt(d)
            elif p == 1.0:
                dist += d
            elif p == 2.0:
                dist += d * d
            else:
                dist += math.pow(d, p)
        if dist < best_sum:
            best_sum, best_j = dist, j
    return best_j, best_sum


def shifted_of(values):
    arr = np.sort(np.asarray(values, dtype=np.float32), kind="stable")
    total = 0.0
    for v in arr:
        total += float(v)
    m32 = float(np.float32(total / len(arr)))
    return arr.astype(np.float64) - m32


def test_lp_distance_identity():
    assert lp_distance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 0.5) == 0.0


def test_lp_distance_hand_example():
    # sum of square roots is 1 + 2 = 3; raising to 1/p squares it
    assert lp_distance([0.0, 0.0], [1.0, 4.0], 0.5) == 9.0


def test_lp_distance_p1_is_manhattan():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.normal(0, 5, 12)
        b = rng.normal(0, 5, 12)
        manhattan = 0.0
        for x, y in zip(a, b):
            manhattan += abs(float(x) - float(y))
        assert lp_distance(a, b, 1.0) == manhattan


def test_lp_distance_length_mismatch():
    with pytest.raises(ValidationError, match="length mismatch"):
        lp_distance([1.0], [1.0, 2.0], 0.5)


def test_shift_sequence_invariants():
    rng = np.random.default_rng(1)
    vals = rng.normal(50, 10, 16).astype(np.float32)
    seq = shift_sequence(vals)
    assert np.all(np.diff(seq.values) >= 0)
    scale = max(1.0, float(np.abs(vals).max()))
    assert abs(seq.values.sum()) <= len(vals) * scale * 1e-6
    assert seq.mean.dtype == np.float32


def test_exact_copy_with_constant_offset_matches_at_zero_distance():
    # dyadic values and a power-of-two length keep every step exact in
    # float32/float64, so sorting + mean-shift cancels the constant entirely
    base = np.array([0.5, -1.25, 2.0, 0.125, -0.75, 1.5, 3.25, -2.0],
                    dtype=np.float32)
    search = np.concatenate([np.full(8, 9.0, dtype=np.float32),
                             (base + 4.0).astype(np.float32)])
    lookahead = base[::-1].copy()  # any order
    params = make_params("sz-pm", n=8, m=16)
    result = find_best_match(SlidingWindow(search, lookahead), params)
    assert result.matched
    assert result.distance == 0.0
    assert result.offset == 8


def test_find_best_match_equals_bruteforce_m16_n4():
    rng = np.random.default_rng(2)
    params = make_params("sz-pm", n=4, m=16)
    for _ in range(300):
        search = rng.normal(0, 50, 16).astype(np.float32)
        lookahead = rng.normal(0, 50, 4).astype(np.float32)
        result = find_best_match(SlidingWindow(search, lookahead), params)
        ysh = shifted_of(lookahead)
        oj, osum = oracle_scan(search, ysh, params.p)
        assert result.offset == oj
        assert result.distance == osum ** (1.0 / params.p)
        assert result.matched == (result.distance < 0.5 * params.m)


def test_theta_zero_never_matches():
    rng = np.random.default_rng(3)
    params = make_params("sz-pm", n=4, m=16, theta=0.0)
    search = rng.normal(0, 1, 16).astype(np.float32)
    lookahead = search[4:8].copy()  # exact copy present
    result = find_best_match(SlidingWindow(search, lookahead), params)
    assert not result.matched
    assert result.distance == 0.0


def test_insufficient_search_history():
    params = make_params("sz-pm", n=4, m=16)
    result = find_best_match(SlidingWindow(np.zeros(3, np.float32),
                                           np.zeros(4, np.float32)), params)
    assert result == MatchResult(False, None, math.inf)


def test_match_result_tie_breaks_to_smallest_offset():
    base = np.array([1.0, 2.0, 4.0, 8.0], dtype=np.float32)
    search = np.concatenate([base, base]).astype(np.float32)
    params = make_params("sz-pm", n=4, m=8)
    result = find_best_match(SlidingWindow(search, base.copy()), params)
    assert result.offset == 0
    assert result.distance == 0.0


def test_pm_predict_perfect_match_reproduces_sorted_lookahead():
    base = np.array([0.25, -0.5, 1.0, 2.5], dtype=np.float32)
    search = np.concatenate([base, np.zeros(4, np.float32)]).astype(np.float32)
    lookahead = base[::-1].copy()
    params = make_params("sz-pm", n=4, m=8)
    match = find_best_match(SlidingWindow(search, lookahead), params)
    assert match.matched and match.offset == 0
    preds, record = pm_predict(SlidingWindow(search, lookahead), match)
    assert np.array_equal(preds, np.sort(lookahead).astype(np.float64))
    assert record.predmd == 0
    assert record.offset == 0
    assert record.mean == float(np.float32(base.astype(np.float64).sum() / 4))


def test_pm_predict_requires_match():
    params = make_params("sz-pm", n=4, m=8)
    window = SlidingWindow(np.zeros(8, np.float32), np.ones(4, np.float32))
    with pytest.raises(ValidationError):
        pm_predict(window, MatchResult(False, None, math.inf))


def test_pm_predict_decoder_side_recomputation():
    """Predictions rebuilt from only (offset, stored mean) and the search
    buffer equal the compressor's predictions."""
    rng = np.random.default_rng(4)
    params = make_params("sz-pm", n=8, m=32, theta=math.inf)
    for _ in range(100):
        search = rng.normal(0, 5, 32).astype(np.float32)
        lookahead = rng.normal(0, 5, 8).astype(np.float32)
        window = SlidingWindow(search, lookahead)
        match = find_best_match(window, params)
        preds, record = pm_predict(window, match)
        cand = np.sort(search[record.offset:record.offset + 8], kind="stable")
        total = 0.0
        for v in cand:
            total += float(v)
        cm32 = float(np.float32(total / 8))
        redo = cand.astype(np.float64) - cm32 + record.mean
        assert np.array_equal(preds, redo)


def test_fallback_closed_loop():
    vals = np.array([5.0, 1.0, 3.0], dtype=np.float32)
    preds, record, codes, recon = pm_fallback_predict(vals, None, 0.5, 511)
    assert record.predmd == 1
    assert preds[0] == 0.0
    assert preds[1] == float(recon[0])
    assert preds[2] == float(recon[1])
    y = np.sort(vals)
    for i, code in enumerate(codes):
        if code is not None:
            assert abs(float(y[i]) - float(recon[i])) <= 0.5


def test_fallback_uses_previous_reconstruction():
    vals = np.array([2.0, 2.0], dtype=np.float32)
    preds, _, _, _ = pm_fallback_predict(vals, 7.5, 0.5, 511)
    assert preds[0] == 7.5


def test_scan_oracle_equality_both_backends():
    rng = np.random.default_rng(5)
    for backend in kernels.available_backends():
        prev = kernels.set_backend(backend)
        try:
            for _ in range(150):
                n = int(rng.integers(2, 9))
                L = int(rng.integers(n, 40))
                search = rng.normal(0, 10, L).astype(np.float32)
                ysh = shifted_of(rng.normal(0, 10, n).astype(np.float32))
                p = float(rng.choice([0.5, 1.0, 2.0, 0.25]))
                assert kernels.pm_scan(search, ysh, p) == oracle_scan(search, ysh, p)
        finally:
            kernels.set_backend(prev)
