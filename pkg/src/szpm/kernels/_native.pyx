# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the kernel contract (see ``pure.py``).

Every function mirrors the pure backend bit for bit: float64 arithmetic in
the same evaluation order, float32-rounded sequence means, stable candidate
sorts, first-minimum candidate selection. The only liberties taken are
mechanical (insertion sort instead of numpy sort, early abandoning of
candidate sums that already exceed the current best), neither of which can
change any result.
"""

import numpy as np

from szpm.core import CorruptStreamError

from libc.math cimport INFINITY, fabs, floor, isfinite, pow, sqrt
from libc.stdlib cimport free, malloc


cdef inline double _term(double absd, double p) noexcept nogil:
    if p == 0.5:
        return sqrt(absd)
    if p == 1.0:
        return absd
    if p == 2.0:
        return absd * absd
    return pow(absd, p)


cdef inline bint _quantize1(double real, double pred, double eb, double width,
                            long long intervals, long long center,
                            float* recon_out, int* code_out) noexcept nogil:
    """Mirror of ``quantize_residual``; returns True when quantized."""
    cdef double steps = (real - pred) / width
    cdef double a
    cdef long long krel, code
    cdef float rec
    recon_out[0] = <float>real
    code_out[0] = -1
    if not isfinite(steps) or fabs(steps) > <double>intervals:
        return False
    a = floor(fabs(steps) + 0.5)
    krel = <long long>a
    if steps < 0:
        krel = -krel
    code = center + krel
    if code < 0 or code >= intervals:
        return False
    rec = <float>(pred + (<double>krel) * width)
    if not isfinite(<double>rec):
        return False
    if fabs(real - <double>rec) > eb:
        return False
    recon_out[0] = rec
    code_out[0] = <int>code
    return True


cdef inline void _insertion_sort(double* a, long long n) noexcept nogil:
    cdef long long i, j
    cdef double key
    for i in range(1, n):
        key = a[i]
        j = i - 1
        while j >= 0 and a[j] > key:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = key


cdef long long _lv_span(const float[::1] stream, int[::1] codes, float[::1] recon,
                        long long start, long long stop, double eb, double width,
                        long long intervals, long long center) except -1:
    cdef double prev
    cdef long long i
    cdef float rec
    cdef int code
    prev = 0.0 if start == 0 else <double>recon[start - 1]
    for i in range(start, stop):
        _quantize1(<double>stream[i], prev, eb, width, intervals, center, &rec, &code)
        codes[i] = code
        recon[i] = rec
        prev = <double>rec
    return 0


def lv_encode(values, double eb, long long intervals):
    cdef const float[::1] stream = np.ascontiguousarray(values, dtype=np.float32)
    cdef long long N = stream.shape[0]
    codes_arr = np.empty(N, dtype=np.int32)
    recon_arr = np.empty(N, dtype=np.float32)
    cdef int[::1] codes = codes_arr
    cdef float[::1] recon = recon_arr
    cdef long long center = (intervals - 1) // 2
    _lv_span(stream, codes, recon, 0, N, eb, 2.0 * eb, intervals, center)
    return codes_arr, recon_arr


def lv_decode(codes_in, unpred_in, double eb, long long intervals):
    cdef const int[::1] codes = np.ascontiguousarray(codes_in, dtype=np.int32)
    cdef const float[::1] unpred = np.ascontiguousarray(unpred_in, dtype=np.float32)
    cdef long long N = codes.shape[0]
    cdef long long U = unpred.shape[0]
    recon_arr = np.empty(N, dtype=np.float32)
    cdef float[::1] recon = recon_arr
    cdef long long center = (intervals - 1) // 2
    cdef double width = 2.0 * eb
    cdef double prev = 0.0
    cdef long long i, u = 0
    cdef int c
    cdef float rec
    for i in range(N):
        c = codes[i]
        if c < 0:
            if u >= U:
                raise CorruptStreamError("corrupt stream: unpredictable section exhausted")
            rec = unpred[u]
            u += 1
        else:
            if c >= intervals:
                raise CorruptStreamError("corrupt stream: quantization code out of range")
            rec = <float>(prev + (<double>(c - center)) * width)
        recon[i] = rec
        prev = <double>rec
    return recon_arr


cdef long long _scan(const float* search, long long L, const double* ysh,
                     long long n, double p, double* tmp,
                     double* best_sum_out) noexcept nogil:
    """Smallest-offset minimal Lp sum over all n-windows of ``search``."""
    cdef long long j, i, best_j = 0
    cdef double best_sum = INFINITY
    cdef double s, mean, mshift, partial, d
    cdef float m32
    cdef bint aborted
    for j in range(L - n + 1):
        for i in range(n):
            tmp[i] = <double>search[j + i]
        _insertion_sort(tmp, n)
        s = 0.0
        for i in range(n):
            s += tmp[i]
        mean = s / <double>n
        m32 = <float>mean
        mshift = <double>m32
        partial = 0.0
        aborted = False
        for i in range(n):
            d = fabs((tmp[i] - mshift) - ysh[i])
            partial += _term(d, p)
            if partial >= best_sum:
                aborted = True
                break
        if not aborted and partial < best_sum:
            best_sum = partial
            best_j = j
    best_sum_out[0] = best_sum
    return best_j


def pm_scan(search_in, y_shift_in, double p):
    cdef const float[::1] search = np.ascontiguousarray(search_in, dtype=np.float32)
    cdef const double[::1] ysh = np.ascontiguousarray(y_shift_in, dtype=np.float64)
    cdef long long L = search.shape[0]
    cdef long long n = ysh.shape[0]
    if L < n or n < 1:
        raise ValueError("search buffer shorter than the look-ahead")
    cdef double* tmp = <double*>malloc(n * sizeof(double))
    if tmp == NULL:
        raise MemoryError()
    cdef double best_sum = 0.0
    cdef long long best_j
    try:
        best_j = _scan(&search[0], L, &ysh[0], n, p, tmp, &best_sum)
    finally:
        free(tmp)
    return int(best_j), float(best_sum)


def pm_encode(stream_in, long long m, long long n, double p, double theta,
              double eb, long long intervals):
    cdef const float[::1] stream = np.ascontiguousarray(stream_in, dtype=np.float32)
    cdef long long N = stream.shape[0]
    cdef long long S = N // n
    codes_arr = np.empty(N, dtype=np.int32)
    recon_arr = np.empty(N, dtype=np.float32)
    predmd_arr = np.empty(S, dtype=np.uint8)
    offsets_arr = np.full(S, -1, dtype=np.int32)
    means_arr = np.zeros(S, dtype=np.float32)
    cdef int[::1] codes = codes_arr
    cdef float[::1] recon = recon_arr
    cdef unsigned char[::1] predmd = predmd_arr
    cdef int[::1] offsets = offsets_arr
    cdef float[::1] means = means_arr
    cdef long long center = (intervals - 1) // 2
    cdef double width = 2.0 * eb
    cdef double inv_p = 1.0 / p
    cdef double* tmp = NULL
    cdef double* ysh = NULL
    cdef long long s, base, L, best_j, i
    cdef double mean_y, best_sum, dist, cmean, pred
    cdef float mean_y32
    cdef bint matched
    cdef float rec
    cdef int code
    if S > 0:
        tmp = <double*>malloc(n * sizeof(double))
        ysh = <double*>malloc(n * sizeof(double))
        if tmp == NULL or ysh == NULL:
            free(tmp)
            free(ysh)
            raise MemoryError()
    try:
        for s in range(S):
            base = s * n
            mean_y = 0.0
            for i in range(n):
                mean_y += <double>stream[base + i]
            mean_y32 = <float>(mean_y / <double>n)
            L = m if m < base else base
            matched = False
            best_j = -1
            if L >= n and theta > 0:
                for i in range(n):
                    ysh[i] = <double>stream[base + i] - <double>mean_y32
                best_j = _scan(&recon[base - L], L, ysh, n, p, tmp, &best_sum)
                dist = pow(best_sum, inv_p)
                matched = dist < theta
            if matched:
                for i in range(n):
                    tmp[i] = <double>recon[base - L + best_j + i]
                _insertion_sort(tmp, n)
                cmean = 0.0
                for i in range(n):
                    cmean += tmp[i]
                cmean = <double>(<float>(cmean / <double>n))
                for i in range(n):
                    pred = tmp[i] - cmean + <double>mean_y32
                    _quantize1(<double>stream[base + i], pred, eb, width,
                               intervals, center, &rec, &code)
                    codes[base + i] = code
                    recon[base + i] = rec
                predmd[s] = 0
                offsets[s] = <int>best_j
                means[s] = mean_y32
            else:
                predmd[s] = 1
                _lv_span(stream, codes, recon, base, base + n, eb, width,
                         intervals, center)
        _lv_span(stream, codes, recon, S * n, N, eb, width, intervals, center)
    finally:
        free(tmp)
        free(ysh)
    return codes_arr, recon_arr, predmd_arr, offsets_arr, means_arr


def pm_decode(codes_in, unpred_in, predmd_in, offsets_in, means_in,
              long long m, long long n, double eb, long long intervals):
    cdef const int[::1] codes = np.ascontiguousarray(codes_in, dtype=np.int32)
    cdef const float[::1] unpred = np.ascontiguousarray(unpred_in, dtype=np.float32)
    cdef const unsigned char[::1] predmd = np.ascontiguousarray(predmd_in, dtype=np.uint8)
    cdef const int[::1] offsets = np.ascontiguousarray(offsets_in, dtype=np.int32)
    cdef const float[::1] means = np.ascontiguousarray(means_in, dtype=np.float32)
    cdef long long N = codes.shape[0]
    cdef long long S = predmd.shape[0]
    cdef long long U = unpred.shape[0]
    recon_arr = np.empty(N, dtype=np.float32)
    cdef float[::1] recon = recon_arr
    cdef long long center = (intervals - 1) // 2
    cdef double width = 2.0 * eb
    cdef double* tmp = NULL
    cdef long long s, base, L, j, i, u = 0, stop
    cdef double cmean, pred, prev
    cdef int c
    cdef float rec
    if S > 0:
        tmp = <double*>malloc(n * sizeof(double))
        if tmp == NULL:
            raise MemoryError()
    try:
        for s in range(S + 1):
            if s < S:
                base = s * n
                stop = base + n
            else:
                base = S * n
                stop = N
                if base >= stop:
                    break
            if s < S and predmd[s] == 0:
                L = m if m < base else base
                j = <long long>offsets[s]
                if L < n or j < 0 or j > L - n:
                    raise CorruptStreamError("corrupt stream: offsets section")
                for i in range(n):
                    tmp[i] = <double>recon[base - L + j + i]
                _insertion_sort(tmp, n)
                cmean = 0.0
                for i in range(n):
                    cmean += tmp[i]
                cmean = <double>(<float>(cmean / <double>n))
                for i in range(n):
                    c = codes[base + i]
                    if c < 0:
                        if u >= U:
                            raise CorruptStreamError(
                                "corrupt stream: unpredictable section exhausted")
                        recon[base + i] = unpred[u]
                        u += 1
                    else:
                        if c >= intervals:
                            raise CorruptStreamError(
                                "corrupt stream: quantization code out of range")
                        pred = tmp[i] - cmean + <double>means[s]
                        recon[base + i] = <float>(pred + (<double>(c - center)) * width)
            else:
                prev = 0.0 if base == 0 else <double>recon[base - 1]
                for i in range(base, stop):
                    c = codes[i]
                    if c < 0:
                        if u >= U:
                            raise CorruptStreamError(
                                "corrupt stream: unpredictable section exhausted")
                        rec = unpred[u]
                        u += 1
                    else:
                        if c >= intervals:
                            raise CorruptStreamError(
                                "corrupt stream: quantization code out of range")
                        rec = <float>(prev + (<double>(c - center)) * width)
                    recon[i] = rec
                    prev = <double>rec
    finally:
        free(tmp)
    return recon_arr


def huffman_encode(symbols_in, enc_len_in, enc_code_in):
    cdef const long long[::1] symbols = np.ascontiguousarray(symbols_in, dtype=np.int64)
    cdef const unsigned char[::1] enc_len = np.ascontiguousarray(enc_len_in, dtype=np.uint8)
    cdef const unsigned long long[::1] enc_code = np.ascontiguousarray(
        enc_code_in, dtype=np.uint64)
    cdef long long N = symbols.shape[0]
    if N == 0:
        return b"", 0
    cdef long long total = 0, i, b
    cdef long long sym
    for i in range(N):
        total += enc_len[symbols[i]]
    out_arr = np.zeros((total + 7) // 8, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef long long pos = 0
    cdef unsigned long long code
    cdef int length
    for i in range(N):
        sym = symbols[i]
        length = enc_len[sym]
        code = enc_code[sym]
        for b in range(length - 1, -1, -1):
            if (code >> b) & 1:
                out[pos >> 3] = out[pos >> 3] | <unsigned char>(1 << (7 - (pos & 7)))
            pos += 1
    return out_arr.tobytes(), int(total)


def huffman_decode(buf, long long nbits, long long count, first_in, counts_in,
                   offs_in, canon_in, long long max_len):
    cdef const unsigned char[::1] data = buf
    cdef const long long[::1] first = np.ascontiguousarray(first_in, dtype=np.int64)
    cdef const long long[::1] counts = np.ascontiguousarray(counts_in, dtype=np.int64)
    cdef const long long[::1] offs = np.ascontiguousarray(offs_in, dtype=np.int64)
    cdef const int[::1] canon = np.ascontiguousarray(canon_in, dtype=np.int32)
    if count == 0:
        if nbits != 0:
            raise CorruptStreamError("corrupt stream: huffman payload length mismatch")
        return np.zeros(0, dtype=np.int32)
    if nbits > data.shape[0] * 8:
        raise CorruptStreamError("corrupt stream: huffman payload truncated")
    out_arr = np.empty(count, dtype=np.int32)
    cdef int[::1] out = out_arr
    cdef long long pos = 0, k, code, length, idx
    for k in range(count):
        code = 0
        length = 0
        while True:
            if pos >= nbits:
                raise CorruptStreamError("corrupt stream: huffman payload truncated")
            code = (code << 1) | ((data[pos >> 3] >> (7 - (pos & 7))) & 1)
            pos += 1
            length += 1
            if length > max_len:
                raise CorruptStreamError("corrupt stream: invalid huffman codeword")
            idx = code - first[length]
            if idx >= 0 and idx < counts[length]:
                out[k] = canon[offs[length] + idx]
                break
    if pos != nbits:
        raise CorruptStreamError("corrupt stream: huffman payload length mismatch")
    return out_arr


def lz77_encode(data, long long search_cap, long long lookahead_cap):
    cdef const unsigned char[::1] buf = data
    cdef long long N = buf.shape[0]
    offs_arr = np.empty(N, dtype=np.uint32)
    lens_arr = np.empty(N, dtype=np.uint32)
    nxts_arr = np.empty(N, dtype=np.uint8)
    cdef unsigned int[::1] offs = offs_arr
    cdef unsigned int[::1] lens = lens_arr
    cdef unsigned char[::1] nxts = nxts_arr
    cdef long long pos = 0, t = 0
    cdef long long max_len, best_len, best_off, wstart, d, s, length, la
    while pos < N:
        la = lookahead_cap if lookahead_cap < N - pos else N - pos
        max_len = la - 1
        best_len = 0
        best_off = 0
        if max_len > 0:
            wstart = pos - search_cap
            if wstart < 0:
                wstart = 0
            for d in range(1, pos - wstart + 1):
                s = pos - d
                # cannot beat the current best unless this byte matches
                if buf[s + best_len] != buf[pos + best_len]:
                    continue
                length = 0
                while length < max_len and buf[s + length] == buf[pos + length]:
                    length += 1
                if length > best_len:
                    best_len = length
                    best_off = d
                    if best_len == max_len:
                        break
        if best_len > 0:
            offs[t] = <unsigned int>best_off
            lens[t] = <unsigned int>best_len
            nxts[t] = buf[pos + best_len]
            pos += best_len + 1
        else:
            offs[t] = 0
            lens[t] = 0
            nxts[t] = buf[pos]
            pos += 1
        t += 1
    return offs_arr[:t].copy(), lens_arr[:t].copy(), nxts_arr[:t].copy()


def lz77_decode(offs_in, lens_in, nxts_in):
    cdef const unsigned int[::1] offs = np.ascontiguousarray(offs_in, dtype=np.uint32)
    cdef const unsigned int[::1] lens = np.ascontiguousarray(lens_in, dtype=np.uint32)
    cdef const unsigned char[::1] nxts = np.ascontiguousarray(nxts_in, dtype=np.uint8)
    cdef long long T = offs.shape[0]
    cdef long long total = 0, k, i, start, length, off, pos = 0
    for k in range(T):
        total += lens[k] + 1
    out_arr = np.empty(total, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    for k in range(T):
        off = offs[k]
        length = lens[k]
        if (off == 0) != (length == 0):
            raise CorruptStreamError("corrupt stream: lz77 token")
        if off:
            start = pos - off
            if start < 0:
                raise CorruptStreamError("corrupt stream: lz77 offset")
            for i in range(length):
                out[pos] = out[start + i]
                pos += 1
        out[pos] = nxts[k]
        pos += 1
    return out_arr.tobytes()
