# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels. Same signatures and outputs as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil
    int ctz64 "__builtin_ctzll"(unsigned long long) nogil


def pairwise_hamming(const uint64_t[::1] codes):
    cdef Py_ssize_t k = codes.shape[0], i, j, pos = 0
    out = np.empty(k * (k - 1) // 2 if k > 1 else 0, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for i in range(k):
            for j in range(i + 1, k):
                o[pos] = popcount64(codes[i] ^ codes[j])
                pos += 1
    return out


def pairwise_intersections(const uint64_t[::1] codes):
    cdef Py_ssize_t k = codes.shape[0], i, j, pos = 0
    out = np.empty(k * (k - 1) // 2 if k > 1 else 0, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for i in range(k):
            for j in range(i + 1, k):
                o[pos] = popcount64(codes[i] & codes[j])
                pos += 1
    return out


def npp_scan(const double[::1] low, const double[::1] high, int h, double threshold, Py_ssize_t cap):
    cdef Py_ssize_t nl = low.shape[0], nh = high.shape[0], i, j
    cdef Py_ssize_t kept = 0, total = 0
    cdef double v, hv, best = np.inf
    cdef uint64_t best_code = 0, code
    cdef int found_best = 0
    cdef Py_ssize_t room = cap if cap < (1 << 22) else (1 << 22)
    codes = np.empty(room, dtype=np.uint64)
    values = np.empty(room, dtype=np.float64)
    cdef uint64_t[::1] c = codes
    cdef double[::1] vals = values
    for j in range(nh):
        hv = high[j]
        for i in range(nl):
            v = fabs(low[i] + hv)
            if v < best:
                best = v
                best_code = 1 | (<uint64_t>i << 1) | (<uint64_t>j << (1 + h))
                found_best = 1
            if v <= threshold:
                total += 1
                if kept < cap:
                    if kept == room:
                        room = min(cap, 2 * room)
                        codes = np.resize(codes, room)
                        values = np.resize(values, room)
                        c = codes
                        vals = values
                    c[kept] = 1 | (<uint64_t>i << 1) | (<uint64_t>j << (1 + h))
                    vals[kept] = v
                    kept += 1
    return codes[:kept].copy(), values[:kept].copy(), (int(best_code) if found_best else -1), float(best), total


def perceptron_scan(const double[:, ::1] low, const double[:, ::1] high, int h, double kappa, Py_ssize_t cap):
    cdef Py_ssize_t m = low.shape[0], nl = low.shape[1], nh = high.shape[1]
    cdef Py_ssize_t i, j, r, kept = 0, total = 0
    cdef double v, worst
    cdef int ok
    cdef Py_ssize_t room = cap if cap < (1 << 20) else (1 << 20)
    codes = np.empty(room, dtype=np.uint64)
    values = np.empty(room, dtype=np.float64)
    cdef uint64_t[::1] c = codes
    cdef double[::1] vals = values
    for j in range(nh):
        for i in range(nl):
            ok = 1
            worst = 0.0
            for r in range(m):
                v = fabs(low[r, i] + high[r, j])
                if v > kappa:
                    ok = 0
                    break
                if v > worst:
                    worst = v
            if ok:
                total += 1
                if kept < cap:
                    if kept == room:
                        room = min(cap, 2 * room)
                        codes = np.resize(codes, room)
                        values = np.resize(values, room)
                        c = codes
                        vals = values
                    c[kept] = <uint64_t>i | (<uint64_t>j << h)
                    vals[kept] = worst
                    kept += 1
    return codes[:kept].copy(), values[:kept].copy(), total


cdef struct SatScan:
    int n
    const uint64_t* masks
    const uint64_t* pats
    const int64_t* starts
    const int64_t* order
    uint64_t* out
    Py_ssize_t cap
    Py_ssize_t total


cdef void _sat_dfs(SatScan* s, int v, uint64_t code) noexcept nogil:
    cdef int b
    cdef int64_t t, c
    cdef uint64_t cand
    if v < 0:
        if s.total < s.cap:
            s.out[s.total] = code
        s.total += 1
        return
    for b in range(2):
        if s.total > s.cap:
            return
        cand = code | (<uint64_t>b << v)
        for t in range(s.starts[v], s.starts[v + 1]):
            c = s.order[t]
            if (cand & s.masks[c]) == s.pats[c]:
                break
        else:
            _sat_dfs(s, v - 1, cand)


def ksat_scan(int n, const uint64_t[::1] masks, const uint64_t[::1] pats, const int64_t[::1] lows, Py_ssize_t cap):
    cdef SatScan s
    order = np.argsort(np.asarray(lows), kind="stable").astype(np.int64)
    starts = np.searchsorted(np.asarray(lows)[order], np.arange(n + 1)).astype(np.int64)
    cdef int64_t[::1] o = order
    cdef int64_t[::1] st = starts
    out = np.empty(cap + 1, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    s.n = n
    s.masks = &masks[0] if masks.shape[0] else NULL
    s.pats = &pats[0] if pats.shape[0] else NULL
    s.starts = &st[0]
    s.order = &o[0] if o.shape[0] else NULL
    s.out = &ov[0]
    s.cap = cap
    s.total = 0
    with nogil:
        _sat_dfs(&s, n - 1, 0)
    kept = s.total if s.total < cap else cap
    return out[:kept].copy(), s.total


cdef struct CliqueState:
    const uint64_t* adj
    int best_size
    uint64_t best_bits


cdef void _expand(CliqueState* s, int size, uint64_t r, uint64_t p) noexcept nogil:
    cdef int order[64]
    cdef int colors[64]
    cdef int cnt = 0, k = 0, v, idx
    cdef uint64_t uncolored = p, avail, bit, newp
    while uncolored:
        k += 1
        avail = uncolored
        while avail:
            v = ctz64(avail)
            bit = (<uint64_t>1) << v
            order[cnt] = v
            colors[cnt] = k
            cnt += 1
            uncolored &= ~bit
            avail &= ~bit & ~s.adj[v]
    for idx in range(cnt - 1, -1, -1):
        if size + colors[idx] <= s.best_size:
            return
        v = order[idx]
        bit = (<uint64_t>1) << v
        newp = p & s.adj[v]
        if newp:
            _expand(s, size + 1, r | bit, newp)
        elif size + 1 > s.best_size:
            s.best_size = size + 1
            s.best_bits = r | bit
        p &= ~bit


def max_clique(const uint64_t[::1] rows, int n):
    cdef CliqueState s
    if n == 0:
        return 0
    if n > 64:
        raise ValueError("compiled clique kernel supports n <= 64")
    s.adj = &rows[0]
    s.best_size = 0
    s.best_bits = 0
    cdef uint64_t full = (~(<uint64_t>0)) if n == 64 else (((<uint64_t>1) << n) - 1)
    with nogil:
        _expand(&s, 0, 0, full)
    return int(s.best_bits)


cdef struct EnumState:
    const uint64_t* adj
    int kmin
    uint64_t* out
    Py_ssize_t limit
    Py_ssize_t count


cdef int _extend(EnumState* s, uint64_t r, int size, uint64_t cand) noexcept nogil:
    cdef int v
    cdef uint64_t bit
    if size >= s.kmin and size > 0:
        s.out[s.count] = r
        s.count += 1
        if s.count >= s.limit:
            return 1
    if size + popcount64(cand) < s.kmin:
        return 0
    while cand:
        v = ctz64(cand)
        bit = (<uint64_t>1) << v
        cand &= ~bit
        if _extend(s, r | bit, size + 1, cand & s.adj[v]):
            return 1
    return 0


def enumerate_cliques(const uint64_t[::1] rows, int n, int kmin, Py_ssize_t cap):
    cdef EnumState s
    if n > 64:
        raise ValueError("compiled clique kernel supports n <= 64")
    out = np.empty(cap + 1, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    s.adj = &rows[0] if n else NULL
    s.kmin = kmin
    s.out = &ov[0]
    s.limit = cap + 1
    s.count = 0
    cdef uint64_t full = (~(<uint64_t>0)) if n == 64 else (((<uint64_t>1) << n) - 1)
    with nogil:
        _extend(&s, 0, 0, full)
    kept = s.count if s.count < cap else cap
    return out[:kept].copy(), s.count
