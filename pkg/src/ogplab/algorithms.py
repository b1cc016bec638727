"""Polynomial-time heuristics: differencing, greedy clique, WalkSAT."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import NodeSubset, SignVector
from .models import GraphInstance, KsatInstance, NppInstance
from .rng import RngStream


@dataclass
class KkTrace:
    """Result of the differencing algorithm.

    ``merges`` lists ``(keep, drop, a, b)``: item ``keep`` (value ``a``) and
    item ``drop`` (value ``b``) were placed on opposite sides and replaced by
    ``a - b``, which keeps the label ``keep``.
    """

    merges: list[tuple[int, int, float, float]]
    discrepancy: float
    partition: SignVector


def karmarkar_karp(inst: NppInstance) -> KkTrace:
    w = np.asarray(inst.weights, dtype=np.float64)
    n = len(w)
    # max-heap on |w|; ties go to the lower item label
    heap = [(-abs(float(x)), i) for i, x in enumerate(w)]
    heapq.heapify(heap)
    merges: list[tuple[int, int, float, float]] = []
    adjacency: list[list[int]] = [[] for _ in range(n)]
    while len(heap) > 1:
        na, ia = heapq.heappop(heap)
        nb, ib = heapq.heappop(heap)
        a, b = -na, -nb
        merges.append((ia, ib, a, b))
        adjacency[ia].append(ib)
        adjacency[ib].append(ia)
        heapq.heappush(heap, (-(a - b), ia))
    discrepancy = -heap[0][0]
    root = heap[0][1]

    # two-colour the merge tree: each edge joins opposite sides
    side = [0] * n
    side[root] = 1
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if side[v] == 0:
                side[v] = -side[u]
                queue.append(v)
    # the tree worked on |w_i|; undo the sign of negative weights
    signs = [side[i] * (1 if w[i] >= 0 else -1) for i in range(n)]
    part = SignVector.from_signs(signs).canonical()
    return KkTrace(merges, float(discrepancy), part)


def greedy_clique(g: GraphInstance, order=None) -> NodeSubset:
    """Scan nodes in ``order``; keep a node iff it is adjacent to all kept nodes."""
    if order is None:
        order = range(g.n)
    else:
        order = [int(v) for v in order]
        if sorted(order) != list(range(g.n)):
            raise ValueError("order must be a permutation of the nodes")
    chosen = 0
    cand = (1 << g.n) - 1
    for v in order:
        if (cand >> v) & 1:
            chosen |= 1 << v
            cand &= g.rows[v]
    return NodeSubset(g.n, chosen)


@dataclass
class WalksatResult:
    assignment: SignVector | None
    flips: int

    @property
    def success(self) -> bool:
        return self.assignment is not None


def walksat(f: KsatInstance, max_flips: int, noise: float, rng: RngStream) -> WalksatResult:
    """WalkSAT from a uniform random start.

    Each step picks a uniformly random violated clause; with probability
    ``noise`` flips a uniform variable of it, otherwise the variable whose
    flip breaks the fewest currently satisfied clauses (lowest index on ties).
    """
    if max_flips < 1:
        raise ValueError("max_flips must be at least 1")
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must lie in [0, 1]")
    n = f.n
    clauses = f.clauses
    occurs: list[list[int]] = [[] for _ in range(n)]
    for ci, c in enumerate(clauses):
        for lit in c:
            occurs[abs(lit) - 1].append(ci)

    words = rng.u64_block((n + 63) // 64)
    val = [bool((int(words[i // 64]) >> (i % 64)) & 1) for i in range(n)]

    def lit_true(lit: int) -> bool:
        return val[abs(lit) - 1] == (lit > 0)

    true_count = [sum(lit_true(l) for l in c) for c in clauses]
    unsat = [ci for ci, t in enumerate(true_count) if t == 0]
    pos = {ci: k for k, ci in enumerate(unsat)}

    def set_unsat(ci: int, now_unsat: bool) -> None:
        if now_unsat and ci not in pos:
            pos[ci] = len(unsat)
            unsat.append(ci)
        elif not now_unsat and ci in pos:
            k = pos.pop(ci)
            last = unsat.pop()
            if last != ci:
                unsat[k] = last
                pos[last] = k

    def flip(v: int) -> None:
        val[v] = not val[v]
        for ci in occurs[v]:
            lit = next(l for l in clauses[ci] if abs(l) - 1 == v)
            true_count[ci] += 1 if lit_true(lit) else -1
            set_unsat(ci, true_count[ci] == 0)

    def breaks(v: int) -> int:
        b = 0
        for ci in occurs[v]:
            if true_count[ci] == 1:
                lit = next(l for l in clauses[ci] if abs(l) - 1 == v)
                if lit_true(lit):
                    b += 1
        return b

    flips = 0
    while unsat and flips < max_flips:
        # the unsat list order depends only on the flip history, so this is reproducible
        ci = unsat[rng.randbelow(len(unsat))]
        vars_ = sorted({abs(l) - 1 for l in clauses[ci]})
        if rng.uniform() < noise:
            v = vars_[rng.randbelow(len(vars_))]
        else:
            v = min(vars_, key=lambda x: (breaks(x), x))
        flip(v)
        flips += 1
    if unsat:
        return WalksatResult(None, flips)
    return WalksatResult(SignVector.from_signs(1 if b else -1 for b in val), flips)
