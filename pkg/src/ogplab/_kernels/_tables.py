"""Half-subset sum tables shared by both kernel backends.

Exhaustive sign scans split the coordinates into a low and a high block and
precompute, for every sign pattern of each block, the partial inner product.
A full value is then one addition ``low[i] + high[j]``. Building the tables
here, once, for both backends makes their outputs bitwise identical.
"""

from __future__ import annotations

import numpy as np


def half_table(weights: np.ndarray, base: float = 0.0) -> np.ndarray:
    """Partial sums over all sign patterns of ``weights``.

    Entry ``c`` is ``base + sum_b s_b * w_b`` with ``s_b = +1`` iff bit ``b`` of
    ``c`` is set, built by doubling so every backend sees the same rounding.
    """
    w = np.asarray(weights, dtype=np.float64)
    acc = float(base)
    for x in w:
        acc = acc - float(x)
    t = np.empty(1 << len(w), dtype=np.float64)
    t[0] = acc
    for k, x in enumerate(w):
        size = 1 << k
        t[size:2 * size] = t[:size] + 2.0 * float(x)
    return t


def npp_tables(weights: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Tables for sign vectors with coordinate 0 fixed to +1.

    Code layout: ``1 | i << 1 | j << (1 + h)`` for low index ``i`` and high
    index ``j``.
    """
    w = np.asarray(weights, dtype=np.float64)
    n = len(w)
    h = (n - 1) // 2
    low = half_table(w[1:1 + h], base=float(w[0]))
    high = half_table(w[1 + h:])
    return low, high, h


def row_tables(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Per-row tables for all 2^n sign vectors; code ``i | j << h``."""
    x = np.asarray(matrix, dtype=np.float64)
    m, n = x.shape
    h = n // 2
    low = np.stack([half_table(x[r, :h]) for r in range(m)]) if m else np.empty((0, 1 << h))
    high = np.stack([half_table(x[r, h:]) for r in range(m)]) if m else np.empty((0, 1 << (n - h)))
    return np.ascontiguousarray(low), np.ascontiguousarray(high), h


def clause_masks(n: int, clauses) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bit masks of the assignments violating each clause.

    A clause is violated iff ``code & mask == pattern``: positive literals
    are false on a 0 bit, negative literals on a 1 bit. Also returns each
    clause's lowest variable index.
    """
    m = len(clauses)
    masks = np.zeros(m, dtype=np.uint64)
    pats = np.zeros(m, dtype=np.uint64)
    lows = np.zeros(m, dtype=np.int64)
    for c, clause in enumerate(clauses):
        mk = pt = 0
        lo = n
        for lit in clause:
            v = abs(lit) - 1
            mk |= 1 << v
            if lit < 0:
                pt |= 1 << v
            lo = min(lo, v)
        masks[c] = mk
        pats[c] = pt
        lows[c] = lo
    return masks, pats, lows
