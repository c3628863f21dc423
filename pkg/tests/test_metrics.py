import json
import math

import numpy as np
import pytest

from szpm import codec, metrics, synth
from szpm.core import ValidationError
from tests.conftest import make_params, roundtrip


def test_components_sum_to_total_exactly():
    data = synth.planted_patterns(96_000, seed=1)
    for predictor in ("sz-lv", "sz-sort", "sz-pm"):
        artifact = codec.compress(data, make_params(predictor, n=16))
        b = metrics.bit_accounting(artifact)
        parts = (b.quant_code_bits + b.predmd_bits + b.offset_bits
                 + b.mean_bits + b.unpredictable_bits + b.header_bits)
        assert parts == b.total_bits
        assert b.header_bits > 0


def test_overall_matches_artifact_byte_size():
    data = synth.mixture(30_000, seed=2)
    artifact = codec.compress(data, make_params("sz-pm", n=8))
    b = metrics.bit_accounting(artifact)
    assert b.total_bits == len(artifact.to_bytes()) * 8
    assert b.overall_bits_per_value == b.total_bits / 30_000


def test_compression_ratio_identity():
    data = synth.gaussian(10_000, seed=3)
    artifact = codec.compress(data, make_params("sz-sort", n=8))
    b = metrics.bit_accounting(artifact)
    assert b.compression_ratio == 32.0 / b.overall_bits_per_value


def test_predmd_is_one_over_n():
    data = synth.planted_patterns(96_000, seed=4)
    for n in (8, 16, 32):
        artifact = codec.compress(data, make_params("sz-pm", n=n))
        b = metrics.bit_accounting(artifact)
        assert b.predmd_bits * n == b.n_values
        assert abs(b.predmd - 1.0 / n) < 1e-15


def test_side_channel_formulas_from_measured_ratio():
    data = synth.planted_patterns(96_000, seed=5)
    for n in (8, 16, 32):
        artifact = codec.compress(data, make_params("sz-pm", n=n))
        b = metrics.bit_accounting(artifact)
        want_off, want_mean = metrics.side_channel_bits_per_value(
            artifact.params.offset_bits, b.pm_ratio, n)
        assert abs(b.offsets - want_off) < 1e-12
        assert abs(b.means - want_mean) < 1e-12


def test_side_channel_reference_points():
    off, mean = metrics.side_channel_bits_per_value(10, 0.996, 8)
    assert abs(off - 1.25) <= 0.01
    assert abs(mean - 3.98) <= 0.01
    off, mean = metrics.side_channel_bits_per_value(10, 0.931, 16)
    assert abs(off - 0.58) <= 0.01
    assert abs(mean - 1.86) <= 0.01


def test_lv_artifacts_have_no_side_channels():
    data = synth.gaussian(5_000, seed=6)
    for predictor in ("sz-lv", "sz-sort"):
        artifact = codec.compress(data, make_params(predictor, n=8))
        b = metrics.bit_accounting(artifact)
        assert b.predmd == 0 and b.offsets == 0 and b.means == 0
        assert b.pm_ratio == 0.0


def test_histogram_totals_and_spike():
    data = np.full(2048, -1.5, dtype=np.float32)
    artifact = codec.compress(data, make_params("sz-lv"))
    hist = metrics.code_histogram(artifact)
    assert hist.sum() == artifact.code_count
    assert hist[255] == artifact.code_count
    csv = metrics.histogram_to_csv(hist)
    lines = csv.strip().split("\n")
    assert lines[0] == "code,count"
    assert len(lines) == 512
    assert lines[256] == f"255,{artifact.code_count}"


def test_histogram_total_equals_mask_count():
    data = synth.mixture(20_000, seed=7)
    artifact, _, _ = roundtrip(data, make_params("sz-sort", n=8))
    hist = metrics.code_histogram(artifact)
    assert int(hist.sum()) == artifact.code_count
    assert artifact.code_count + artifact.unpredictable_count == artifact.n_values


def test_verify_round_trip_passes():
    rng = np.random.default_rng(8)
    for _ in range(25):
        data = rng.normal(0, 10, int(rng.integers(100, 3000))).astype(np.float32)
        params = make_params("sz-sort", eb_rel=1e-3, n=8)
        artifact, ref, out = roundtrip(data, params)
        res = metrics.verify_error_bound(ref, out, params)
        assert res.ok


def test_verify_reports_planted_violation_index():
    data = synth.gaussian(4_000, seed=9)
    params = make_params("sz-lv", eb_rel=1e-3)
    artifact, ref, out = roundtrip(data, params)
    bad = out.copy()
    bad[1234] += np.float32(3 * artifact.resolved_abs)
    res = metrics.verify_error_bound(ref, bad, params)
    assert not res.ok
    assert res.worst_index == 1234
    assert res.max_abs_error > artifact.resolved_abs


def test_verify_bound_arithmetic_range_1000():
    rng = np.random.default_rng(10)
    data = (rng.uniform(0, 1000, 5000)).astype(np.float32)
    data[0], data[1] = 0.0, 1000.0  # pin the range
    params = make_params("sz-sort", eb_rel=1e-4, n=8)
    artifact, ref, out = roundtrip(data, params)
    res = metrics.verify_error_bound(ref, out, params)
    assert res.ok
    assert res.max_abs_error <= 0.1 + 1e-9


def test_verify_length_mismatch():
    params = make_params("sz-lv")
    with pytest.raises(ValidationError, match="length mismatch"):
        metrics.verify_error_bound([1.0, 2.0], [1.0], params)


def test_breakdown_emitters():
    data = synth.planted_patterns(8_000, seed=11)
    artifact = codec.compress(data, make_params("sz-pm", n=8))
    b = metrics.bit_accounting(artifact)
    d = b.to_dict()
    parsed = json.loads(json.dumps(d))
    assert parsed["n_values"] == 8_000
    assert math.isclose(parsed["bits_per_value"]["overall"],
                        b.overall_bits_per_value)
    text = b.format_text()
    assert "bits/value" in text and "compression ratio" in text
    # two-decimal reporting
    assert f"{b.quant_codes:.2f}" in text
    row = metrics.breakdown_row("sz-pm(8)", b)
    csv = metrics.rows_to_csv([row])
    assert csv.splitlines()[0].startswith("label,quant_codes")
    table = metrics.rows_to_text([row])
    assert "sz-pm(8)" in table
