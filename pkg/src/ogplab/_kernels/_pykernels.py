"""Pure Python / numpy kernels; the reference twin of ``_ckernels``.

Every function here has the same signature and returns the same values,
element for element, as its compiled counterpart.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 1 << 20


def pairwise_hamming(codes: np.ndarray) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.uint64)
    k = len(codes)
    parts = [np.bitwise_count(codes[i] ^ codes[i + 1:]).astype(np.int64) for i in range(k - 1)]
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def pairwise_intersections(codes: np.ndarray) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.uint64)
    k = len(codes)
    parts = [np.bitwise_count(codes[i] & codes[i + 1:]).astype(np.int64) for i in range(k - 1)]
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def npp_scan(low: np.ndarray, high: np.ndarray, h: int, threshold: float, cap: int):
    """Scan all codes ``1 | i << 1 | j << (1+h)`` in increasing order.

    Returns (codes, values, best_code, best_value, total_count); at most
    ``cap`` solutions are kept, ``total_count`` counts all of them.
    """
    nl = len(low)
    rows = max(1, _BLOCK // nl)
    codes, values = [], []
    kept = 0
    total = 0
    best_code, best_value = -1, np.inf
    i_codes = (np.arange(nl, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
    for j0 in range(0, len(high), rows):
        hb = high[j0:j0 + rows]
        v = np.abs(low[None, :] + hb[:, None])
        flat = v.ravel()
        a = int(np.argmin(flat))
        if flat[a] < best_value:
            best_value = float(flat[a])
            jj, ii = divmod(a, nl)
            best_code = int(i_codes[ii]) | ((j0 + jj) << (1 + h))
        jj, ii = np.nonzero(v <= threshold)
        total += len(jj)
        if kept < cap and len(jj):
            take = min(cap - kept, len(jj))
            jj, ii = jj[:take], ii[:take]
            c = i_codes[ii] | (np.uint64(j0) + jj.astype(np.uint64)) << np.uint64(1 + h)
            codes.append(c)
            values.append(v[jj, ii])
            kept += take
    codes = np.concatenate(codes) if codes else np.empty(0, dtype=np.uint64)
    values = np.concatenate(values) if values else np.empty(0, dtype=np.float64)
    return codes, values, best_code, best_value, total


def perceptron_scan(low: np.ndarray, high: np.ndarray, h: int, kappa: float, cap: int):
    """All codes ``i | j << h`` with every row value in [-kappa, kappa].

    Returns (codes, values, total_count) with values the largest |row value|.
    """
    m, nl = low.shape
    nh = high.shape[1]
    rows = max(1, _BLOCK // nl)
    codes, values = [], []
    kept = total = 0
    i_codes = np.arange(nl, dtype=np.uint64)
    for j0 in range(0, nh, rows):
        j1 = min(nh, j0 + rows)
        worst = np.zeros((j1 - j0, nl))
        alive = np.ones((j1 - j0, nl), dtype=bool)
        for r in range(m):
            v = np.abs(low[r][None, :] + high[r, j0:j1][:, None])
            alive &= v <= kappa
            np.maximum(worst, v, out=worst)
        jj, ii = np.nonzero(alive)
        total += len(jj)
        if kept < cap and len(jj):
            take = min(cap - kept, len(jj))
            jj, ii = jj[:take], ii[:take]
            codes.append(i_codes[ii] | (np.uint64(j0) + jj.astype(np.uint64)) << np.uint64(h))
            values.append(worst[jj, ii])
            kept += take
    codes = np.concatenate(codes) if codes else np.empty(0, dtype=np.uint64)
    values = np.concatenate(values) if values else np.empty(0, dtype=np.float64)
    return codes, values, total


def ksat_scan(n: int, masks: np.ndarray, pats: np.ndarray, lows: np.ndarray, cap: int):
    """Satisfying assignments in increasing code order.

    Variables are fixed from ``n-1`` down to 0; a clause is tested as soon
    as its lowest variable is fixed. Returns (codes, count) where count is
    capped at ``cap + 1`` so truncation is visible.
    """
    masks = np.asarray(masks, dtype=np.uint64)
    pats = np.asarray(pats, dtype=np.uint64)
    by_low = [np.flatnonzero(lows == v) for v in range(n)]
    frontier = np.zeros(1, dtype=np.uint64)
    for v in range(n - 1, -1, -1):
        frontier = np.concatenate([frontier, frontier | np.uint64(1 << v)])
        for c in by_low[v]:
            frontier = frontier[(frontier & masks[c]) != pats[c]]
        if len(frontier) == 0:
            break
    frontier.sort()
    return frontier[:cap].copy(), min(len(frontier), cap + 1)


def _low_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def max_clique(rows: np.ndarray, n: int) -> int:
    """Maximum clique by branch and bound with a greedy-coloring bound."""
    adj = [int(r) for r in rows]
    best = [0, 0]  # size, bits

    def color_order(p: int):
        order, colors = [], []
        uncolored = p
        k = 0
        while uncolored:
            k += 1
            avail = uncolored
            while avail:
                v = _low_bit(avail)
                bit = 1 << v
                order.append(v)
                colors.append(k)
                uncolored &= ~bit
                avail &= ~bit & ~adj[v]
        return order, colors

    def expand(size: int, r: int, p: int):
        order, colors = color_order(p)
        for idx in range(len(order) - 1, -1, -1):
            if size + colors[idx] <= best[0]:
                return
            v = order[idx]
            bit = 1 << v
            newp = p & adj[v]
            if newp:
                expand(size + 1, r | bit, newp)
            elif size + 1 > best[0]:
                best[0] = size + 1
                best[1] = r | bit
            p &= ~bit

    if n:
        expand(0, 0, (1 << n) - 1)
    return best[1]


def enumerate_cliques(rows: np.ndarray, n: int, kmin: int, cap: int):
    """Cliques of size >= kmin, each emitted once, in depth-first order.

    Returns (codes, count) with count capped at ``cap + 1``.
    """
    adj = [int(r) for r in rows]
    out: list[int] = []
    limit = cap + 1

    def extend(r: int, size: int, cand: int) -> bool:
        if size >= kmin and size > 0:
            out.append(r)
            if len(out) >= limit:
                return True
        if size + cand.bit_count() < kmin:
            return False
        while cand:
            v = _low_bit(cand)
            bit = 1 << v
            cand &= ~bit
            # only higher-indexed neighbours remain candidates
            if extend(r | bit, size + 1, cand & adj[v]):
                return True
        return False

    extend(0, 0, (1 << n) - 1)
    return np.array(out[:cap], dtype=np.uint64), len(out)
