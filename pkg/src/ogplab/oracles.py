"""Exhaustive ground truth: enumeration, exact solvers, clustering, m-tuple search.

Size guards raise :class:`~ogplab.models.GuardError` instead of silently
truncating; a partial solution set would invalidate every overlap statistic
computed from it. Caps on the number of *stored* solutions are explicit and
always reported through ``SolutionSet.truncated``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._kernels import kernels
from ._kernels._tables import clause_masks, npp_tables, row_tables
from .core import NodeSubset, SignVector, SolutionSet
from .models import (
    GraphInstance,
    GuardError,
    KsatInstance,
    NppInstance,
    PerceptronInstance,
    PSpinInstance,
    pspin_energies,
)
from .rng import RngStream

NPP_MAX_N = 32
CLIQUE_MAX_N = 64
SCAN_MAX_N = 28
PSPIN_MAX_N = 22
DEFAULT_CAP = 1 << 20


def npp_threshold(n: int, alpha: float) -> float:
    """Value cutoff sqrt(n) * 2^(-alpha n)."""
    return math.sqrt(n) * 2.0 ** (-alpha * n)


def _npp_guard(inst: NppInstance) -> None:
    if inst.n > NPP_MAX_N:
        raise GuardError(f"NPP enumeration needs n <= {NPP_MAX_N}, got {inst.n}")


def enumerate_npp(
    inst: NppInstance,
    alpha: float | None = None,
    cap: int = DEFAULT_CAP,
    threshold: float | None = None,
) -> SolutionSet:
    """All partitions (first coordinate fixed to +1) with value <= threshold.

    The threshold is ``sqrt(n) 2^(-alpha n)`` unless given explicitly. The
    global optimum over all partitions is recorded in ``params["optimum"]``.
    """
    _npp_guard(inst)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if threshold is None:
        if alpha is None:
            raise ValueError("give alpha or threshold")
        threshold = npp_threshold(inst.n, alpha)
    low, high, h = npp_tables(inst.weights)
    codes, values, best_code, best_value, total = kernels.npp_scan(low, high, h, float(threshold), cap)
    return SolutionSet(
        model="npp",
        n=inst.n,
        threshold=float(threshold),
        codes=[int(c) for c in codes],
        values=[float(v) for v in values],
        kind="sign",
        truncated=total > cap,
        params={
            "alpha": alpha,
            "seed": inst.seed,
            "total": int(total),
            "optimum": float(best_value),
            "optimum_code": format(best_code, "x"),
        },
    )


def npp_optimum(inst: NppInstance) -> tuple[float, SignVector]:
    """Exact minimum of |<s, w>| by exhaustive scan."""
    _npp_guard(inst)
    low, high, h = npp_tables(inst.weights)
    _, _, code, value, _ = kernels.npp_scan(low, high, h, -1.0, 1)
    return float(value), SignVector(inst.n, int(code))


def exact_max_clique(g: GraphInstance, guard: int = CLIQUE_MAX_N) -> NodeSubset:
    if g.n > min(guard, CLIQUE_MAX_N):
        raise GuardError(f"exact clique search needs n <= {min(guard, CLIQUE_MAX_N)}, got {g.n}")
    return NodeSubset(g.n, int(kernels.max_clique(g.word_rows(), g.n)))


def enumerate_cliques(g: GraphInstance, kmin: int, cap: int = DEFAULT_CAP) -> SolutionSet:
    """All cliques with at least ``kmin`` nodes. Objective is minus the size."""
    if g.n > CLIQUE_MAX_N:
        raise GuardError(f"clique enumeration needs n <= {CLIQUE_MAX_N}, got {g.n}")
    if kmin < 1:
        raise ValueError("kmin must be at least 1")
    codes, count = kernels.enumerate_cliques(g.word_rows(), g.n, int(kmin), cap)
    codes = [int(c) for c in codes]
    return SolutionSet(
        model="clique",
        n=g.n,
        threshold=-float(kmin),
        codes=codes,
        values=[-float(c.bit_count()) for c in codes],
        kind="subset",
        truncated=count > cap,
        params={"kmin": kmin, "seed": g.seed},
    )


def enumerate_sat(f: KsatInstance, cap: int = DEFAULT_CAP) -> SolutionSet:
    if f.n > SCAN_MAX_N:
        raise GuardError(f"SAT enumeration needs n <= {SCAN_MAX_N}, got {f.n}")
    masks, pats, lows = clause_masks(f.n, f.clauses)
    codes, count = kernels.ksat_scan(f.n, masks, pats, lows, cap)
    return SolutionSet(
        model="ksat",
        n=f.n,
        threshold=0.0,
        codes=[int(c) for c in codes],
        values=[0.0] * len(codes),
        kind="sign",
        truncated=count > cap,
        params={"m": f.m, "k": f.k, "seed": f.seed},
    )


def enumerate_perceptron(inst: PerceptronInstance, cap: int = DEFAULT_CAP) -> SolutionSet:
    """All s with |<row, s>| <= kappa for every row; value is the largest |<row, s>|."""
    if inst.n > SCAN_MAX_N:
        raise GuardError(f"perceptron enumeration needs n <= {SCAN_MAX_N}, got {inst.n}")
    low, high, h = row_tables(inst.matrix)
    codes, values, total = kernels.perceptron_scan(low, high, h, inst.kappa, cap)
    return SolutionSet(
        model="perceptron",
        n=inst.n,
        threshold=inst.kappa,
        codes=[int(c) for c in codes],
        values=[float(v) for v in values],
        kind="sign",
        truncated=total > cap,
        params={"m": inst.m, "kappa": inst.kappa, "seed": inst.seed},
    )


def _sign_rows(codes: np.ndarray, n: int) -> np.ndarray:
    bits = (codes[:, None] >> np.arange(n, dtype=np.uint64)[None, :]) & np.uint64(1)
    return bits.astype(np.float64) * 2.0 - 1.0


def pspin_landscape(inst: PSpinInstance, block: int = 1 << 15) -> tuple[np.ndarray, np.ndarray]:
    """Energies of every configuration, as (codes, energies).

    For even p only the representatives with s_0 = +1 are listed, since
    E(s) = E(-s).
    """
    if inst.n > PSPIN_MAX_N:
        raise GuardError(f"p-spin enumeration needs n <= {PSPIN_MAX_N}, got {inst.n}")
    n = inst.n
    if inst.p % 2 == 0:
        codes = (np.arange(1 << (n - 1), dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
    else:
        codes = np.arange(1 << n, dtype=np.uint64)
    energies = np.empty(len(codes))
    for s in range(0, len(codes), block):
        energies[s:s + block] = pspin_energies(inst, _sign_rows(codes[s:s + block], n))
    return codes, energies


def enumerate_pspin(inst: PSpinInstance, mu: float, cap: int = DEFAULT_CAP) -> SolutionSet:
    """Configurations with energy at most ground energy + mu."""
    codes, energies = pspin_landscape(inst)
    ground = float(energies.min())
    thr = ground + mu
    keep = np.flatnonzero(energies <= thr)
    return SolutionSet(
        model="pspin",
        n=inst.n,
        threshold=thr,
        codes=[int(c) for c in codes[keep[:cap]]],
        values=[float(e) for e in energies[keep[:cap]]],
        kind="sign",
        truncated=len(keep) > cap,
        params={"p": inst.p, "mu": mu, "ground": ground, "seed": inst.seed},
    )


@dataclass
class DpllResult:
    satisfiable: bool
    witness: SignVector | None
    decisions: int


def dpll_sat(f: KsatInstance) -> DpllResult:
    """Complete DPLL: unit propagation, branch on the variable occurring most
    often in unresolved clauses (lowest index on ties), true branch first."""
    n, clauses = f.n, f.clauses
    m = len(clauses)
    occ: dict[int, list[int]] = {}
    for ci, c in enumerate(clauses):
        for lit in c:
            occ.setdefault(lit, []).append(ci)
    value = [0] * (n + 1)
    n_true = [0] * m
    n_free = [len(c) for c in clauses]
    trail: list[int] = []
    decisions = 0

    if any(len(c) == 0 for c in clauses):
        return DpllResult(False, None, 0)

    def assign(lit: int, units: list[int]) -> bool:
        v = abs(lit)
        value[v] = 1 if lit > 0 else -1
        trail.append(v)
        for ci in occ.get(lit, ()):
            n_true[ci] += 1
            n_free[ci] -= 1
        ok = True
        for ci in occ.get(-lit, ()):
            n_free[ci] -= 1
            if n_true[ci] == 0:
                if n_free[ci] == 0:
                    ok = False
                elif n_free[ci] == 1:
                    units.append(ci)
        return ok

    def undo(mark: int) -> None:
        while len(trail) > mark:
            v = trail.pop()
            lit = v if value[v] > 0 else -v
            value[v] = 0
            for ci in occ.get(lit, ()):
                n_true[ci] -= 1
                n_free[ci] += 1
            for ci in occ.get(-lit, ()):
                n_free[ci] += 1

    def propagate(units: list[int]) -> bool:
        while units:
            ci = units.pop()
            if n_true[ci]:
                continue
            free = [l for l in clauses[ci] if value[abs(l)] == 0]
            if not free:
                return False
            if not assign(free[0], units):
                return False
        return True

    def pick() -> int:
        counts = [0] * (n + 1)
        for ci, c in enumerate(clauses):
            if n_true[ci] == 0:
                for lit in c:
                    if value[abs(lit)] == 0:
                        counts[abs(lit)] += 1
        best, bestc = 0, 0
        for v in range(1, n + 1):
            if value[v] == 0 and counts[v] > bestc:
                best, bestc = v, counts[v]
        return best

    def solve() -> bool:
        nonlocal decisions
        v = pick()
        if v == 0:
            return all(n_true[ci] > 0 for ci in range(m))
        for lit in (v, -v):
            decisions += 1
            mark = len(trail)
            units: list[int] = []
            if assign(lit, units) and propagate(units) and solve():
                return True
            undo(mark)
        return False

    units0 = [ci for ci in range(m) if n_free[ci] == 1]
    if not propagate(units0) or not solve():
        return DpllResult(False, None, decisions)
    # unconstrained variables default to true
    witness = SignVector.from_signs(-1 if value[v] < 0 else 1 for v in range(1, n + 1))
    return DpllResult(True, witness, decisions)


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


@dataclass
class ClusterDecomposition:
    radius: int
    clusters: list[list[int]]
    n: int

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]

    @property
    def singleton_fraction(self) -> float:
        if not self.clusters:
            return 0.0
        return sum(1 for c in self.clusters if len(c) == 1) / len(self.clusters)

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "n": self.n,
            "count": len(self.clusters),
            "sizes": self.sizes,
            "singleton_fraction": self.singleton_fraction,
            "clusters": [[format(c, "x") for c in cl] for cl in self.clusters],
        }


def _ball_masks(n: int, r: int):
    for d in range(1, r + 1):
        for idx in combinations(range(n), d):
            mask = 0
            for i in idx:
                mask |= 1 << i
            yield mask


def cluster_decompose(sset: SolutionSet, r: int) -> ClusterDecomposition:
    """Connected components of the graph joining solutions at Hamming distance <= r.

    Clusters are listed by their smallest code, members in increasing order,
    so the result does not depend on the input order.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    codes = sorted(sset.codes)
    k = len(codes)
    uf = UnionFind(k)
    ball = sum(math.comb(sset.n, d) for d in range(1, min(r, sset.n) + 1))
    if ball < k and sset.n <= 64:
        index = {c: i for i, c in enumerate(codes)}
        masks = list(_ball_masks(sset.n, min(r, sset.n)))
        for i, c in enumerate(codes):
            for mk in masks:
                j = index.get(c ^ mk)
                if j is not None:
                    uf.union(i, j)
    elif sset.n <= 64 and k > 1:
        arr = np.array(codes, dtype=np.uint64)
        for i in range(k - 1):
            d = np.bitwise_count(arr[i] ^ arr[i + 1:])
            for j in np.flatnonzero(d <= r):
                uf.union(i, i + 1 + int(j))
    else:
        for i in range(k):
            for j in range(i + 1, k):
                if (codes[i] ^ codes[j]).bit_count() <= r:
                    uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i, c in enumerate(codes):
        groups.setdefault(uf.find(i), []).append(c)
    clusters = sorted(groups.values(), key=lambda g: g[0])
    return ClusterDecomposition(r, clusters, sset.n)


@dataclass
class TupleSearchReport:
    """Outcome of an m-tuple search.

    ``status`` is ``"found"``, ``"none"`` (exhaustive search proved no tuple
    exists) or ``"inconclusive"`` (budget exhausted, or a randomized search
    that found nothing).
    """

    m: int
    nu1: float
    nu2: float
    status: str
    witness: list[SignVector] | None = None
    visited: int = 0
    mode: str = "exhaustive"
    quotient: bool = False
    overlaps: list[float] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status == "found"

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "nu1": self.nu1,
            "nu2": self.nu2,
            "status": self.status,
            "found": self.found,
            "mode": self.mode,
            "quotient": self.quotient,
            "visited": self.visited,
            "witness": [w.hex() for w in self.witness] if self.witness else None,
            "overlaps": self.overlaps,
        }


def _pair_overlap(a: int, b: int, n: int, quotient: bool) -> float:
    o = (n - 2 * (a ^ b).bit_count()) / n
    return abs(o) if quotient else o


def tuple_gap_search(
    sets: list[SolutionSet],
    m: int,
    nu1: float,
    nu2: float,
    budget: int = 10_000_000,
    mode: str = "exhaustive",
    quotient: bool = False,
    seed: int = 0,
) -> TupleSearchReport:
    """Look for one solution per set with every pairwise overlap in (nu1, nu2).

    Exhaustive mode is a depth-first product scan pruned on partial tuples;
    it reports ``"inconclusive"`` rather than ``"none"`` if it visits more
    than ``budget`` partial tuples. Random mode draws ``budget`` tuples.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if len(sets) != m:
        raise ValueError(f"need exactly m={m} solution sets, got {len(sets)}")
    n = sets[0].n
    if any(s.n != n for s in sets):
        raise ValueError("solution sets disagree on dimension")
    if any(s.kind != "sign" for s in sets):
        raise ValueError("tuple search works on sign solutions")
    pools = [list(s.codes) for s in sets]

    def inside(o: float) -> bool:
        return nu1 < o < nu2

    def report(status, tup=None, visited=0):
        wit = ovs = None
        if tup is not None:
            wit = [SignVector(n, c) for c in tup]
            ovs = [_pair_overlap(a, b, n, quotient) for a, b in combinations(tup, 2)]
        return TupleSearchReport(m, nu1, nu2, status, wit, visited, mode, quotient, ovs or [])

    if any(len(p) == 0 for p in pools):
        return report("none")

    if mode == "random":
        rng = RngStream(seed)
        for it in range(budget):
            tup = [p[rng.randbelow(len(p))] for p in pools]
            if all(inside(_pair_overlap(a, b, n, quotient)) for a, b in combinations(tup, 2)):
                return report("found", tup, it + 1)
        return report("inconclusive", None, budget)
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")

    visited = 0
    chosen: list[int] = []

    class _Budget(Exception):
        pass

    def dfs(level: int) -> bool:
        nonlocal visited
        if level == m:
            return True
        for c in pools[level]:
            visited += 1
            if visited > budget:
                raise _Budget
            if all(inside(_pair_overlap(c, prev, n, quotient)) for prev in chosen):
                chosen.append(c)
                if dfs(level + 1):
                    return True
                chosen.pop()
        return False

    try:
        if dfs(0):
            return report("found", list(chosen), visited)
    except _Budget:
        return report("inconclusive", None, visited)
    return report("none", None, visited)
