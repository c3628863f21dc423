"""Deterministic synthetic corpora for testing and benchmarking.

Three generators, all seeded: plain Gaussian noise, a heavy-tailed mixture
(a dense core plus rare wide outliers, so a range-relative bound resolves to
something much smaller than the core spread), and a planted-pattern stream
where motifs recur, shifted by a constant and perturbed by per-point noise.
Repeats reuse a quarter, half, or full motif and are aligned to their own
length, so shorter match windows see strictly more repeats than longer ones.
"""

from __future__ import annotations

import numpy as np

_REPEAT_FRACTIONS = (4, 2, 1)  # motif length divisors: quarter, half, full
_REPEAT_FRACTION_PROBS = (0.3, 0.3, 0.4)


def gaussian(count: int, mu: float = 0.0, sigma: float = 1.0, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.normal(mu, sigma, count).astype(np.float32)


def mixture(count: int, mu: float = 0.0, sigma: float = 1.0, seed: int = 0) -> np.ndarray:
    """Dense core plus a secondary mode and rare wide outliers."""
    rng = np.random.default_rng(seed)
    comp = rng.choice(3, size=count, p=[0.90, 0.07, 0.03])
    vals = rng.normal(mu, sigma, count)
    vals = np.where(comp == 1, rng.normal(mu + 6 * sigma, 2 * sigma, count), vals)
    vals = np.where(comp == 2, rng.normal(mu, 25 * sigma, count), vals)
    return vals.astype(np.float32)


def planted_patterns(count: int, pattern_len: int = 32, repeat_prob: float = 0.85,
                     noise_sigma: float = 0.45, seed: int = 0, *,
                     base_sigma: float = 10.0, outlier_sigma: float = 1250.0,
                     outlier_prob: float = 0.001, library_size: int = 6) -> np.ndarray:
    """Stream of filler blocks and noisy motif repeats.

    A repeat copies the leading quarter, half, or whole of a library motif,
    adds one constant shift for the whole copy plus i.i.d. noise per point,
    and is padded to start on a multiple of its own length. Filler is core
    Gaussian with rare large outliers that widen the value range.
    """
    if pattern_len < 1 or count < 0:
        raise ValueError("pattern_len must be >= 1 and count >= 0")
    rng = np.random.default_rng(seed)
    library = rng.normal(0.0, base_sigma, (library_size, pattern_len))
    out = np.empty(count, dtype=np.float32)
    pos = 0

    def filler(k):
        vals = rng.normal(0.0, base_sigma, k)
        wide = rng.random(k) < outlier_prob
        if wide.any():
            vals[wide] = rng.normal(0.0, outlier_sigma, int(wide.sum()))
        return vals

    def emit(vals):
        nonlocal pos
        take = min(len(vals), count - pos)
        out[pos:pos + take] = vals[:take]
        pos += take

    while pos < count:
        if rng.random() < repeat_prob:
            k = int(rng.integers(library_size))
            div = int(rng.choice(_REPEAT_FRACTIONS, p=_REPEAT_FRACTION_PROBS))
            rep_len = max(1, pattern_len // div)
            pad = (-pos) % rep_len
            if pad:
                emit(filler(pad))
            if pos >= count:
                break
            shift = rng.normal(0.0, 2.0 * base_sigma)
            noise = rng.normal(0.0, noise_sigma, rep_len)
            emit(library[k][:rep_len] + shift + noise)
        else:
            emit(filler(pattern_len))
    return out


GENERATORS = {
    "gaussian": gaussian,
    "mixture": mixture,
    "planted": planted_patterns,
}
