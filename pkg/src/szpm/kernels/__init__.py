"""Backend dispatch for the hot loops.

Two interchangeable implementations exist: ``szpm.kernels._native``
(compiled Cython) and ``szpm.kernels.pure`` (NumPy/Python). Both follow the
bit-exact contract documented in ``pure.py``, so artifacts are byte-identical
regardless of backend. Selection at import time: the ``SZPM_BACKEND``
environment variable ("native" or "pure") wins, otherwise the compiled
module is used when importable, with the pure fallback taking over when it
is not built.
"""

from __future__ import annotations

import os

from szpm.kernels import pure as _pure

try:
    from szpm.kernels import _native as _native_mod
except ImportError:
    _native_mod = None

_BACKENDS = {"pure": _pure}
if _native_mod is not None:
    _BACKENDS["native"] = _native_mod


def _initial():
    forced = os.environ.get("SZPM_BACKEND", "").strip().lower()
    if forced:
        if forced not in ("pure", "native"):
            raise ImportError(f"unknown SZPM_BACKEND value {forced!r}")
        if forced == "native" and _native_mod is None:
            raise ImportError("SZPM_BACKEND=native but the compiled kernels are not built")
        return _BACKENDS[forced]
    return _BACKENDS.get("native", _pure)


_impl = _initial()


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend() -> str:
    return "native" if _impl is _native_mod and _native_mod is not None else "pure"


def set_backend(name: str) -> str:
    """Switch backends at runtime (used by tests and the benchmark); returns
    the previously active backend name."""
    global _impl
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    previous = get_backend()
    _impl = _BACKENDS[name]
    return previous


def lv_encode(values, eb, intervals):
    return _impl.lv_encode(values, eb, intervals)


def lv_decode(codes, unpred, eb, intervals):
    return _impl.lv_decode(codes, unpred, eb, intervals)


def pm_scan(search, y_shift, p):
    return _impl.pm_scan(search, y_shift, p)


def pm_encode(stream, m, n, p, theta, eb, intervals):
    return _impl.pm_encode(stream, m, n, p, theta, eb, intervals)


def pm_decode(codes, unpred, predmd, offsets, means, m, n, eb, intervals):
    return _impl.pm_decode(codes, unpred, predmd, offsets, means, m, n, eb, intervals)


def huffman_encode(symbols, enc_len, enc_code):
    return _impl.huffman_encode(symbols, enc_len, enc_code)


def huffman_decode(buf, nbits, count, first, counts, offs, canon, max_len):
    return _impl.huffman_decode(buf, nbits, count, first, counts, offs, canon, max_len)


def lz77_encode(data, search_cap, lookahead_cap):
    return _impl.lz77_encode(data, search_cap, lookahead_cap)


def lz77_decode(offs, lens, nxts):
    return _impl.lz77_decode(offs, lens, nxts)
