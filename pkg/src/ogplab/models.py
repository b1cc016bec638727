"""Seeded random instances and their objective functions.

Draw order is fixed so that an instance is a pure function of its
parameters and seed:

* NPP weights: one Gaussian per item, index order.
* G(n, p): one uniform per pair in lexicographic (i < j) order, edge iff u < p.
* K-SAT: per clause, k distinct variables by rejection, then k sign bits.
* p-spin: one Gaussian per ordered index tuple, row-major.
* Perceptron: one Gaussian per matrix entry, row-major.

Instances serialize to a manifest holding only model tag, parameters and
seed; the payload is regenerated on load.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionError, NodeSubset, SignVector
from .rng import RngStream

MAX_GRAPH_NODES = 1 << 14
MAX_PSPIN_ENTRIES = 1 << 22
MAX_PERCEPTRON_ENTRIES = 1 << 22


class GuardError(ValueError):
    """A size guard refused the request."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_seed(seed):
    if seed is not None and not 0 <= seed < (1 << 64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")


@dataclass(frozen=True, eq=False)
class NppInstance:
    n: int
    weights: np.ndarray
    seed: int | None = None

    model = "npp"

    @classmethod
    def from_weights(cls, weights) -> "NppInstance":
        w = np.array(weights, dtype=np.float64)
        if w.ndim != 1 or len(w) < 1:
            raise ValueError("weights must be a nonempty vector")
        return cls(len(w), _frozen(w), None)

    def manifest(self) -> dict:
        if self.seed is None:
            return {"model": "npp", "n": self.n, "weights": [float(x) for x in self.weights]}
        return {"model": "npp", "n": self.n, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class GraphInstance:
    """Simple undirected graph; ``rows[i]`` is the neighbour bitset of node i."""

    n: int
    p: float | None
    rows: tuple[int, ...]
    seed: int | None = None

    model = "graph"

    @classmethod
    def from_edges(cls, n: int, edges) -> "GraphInstance":
        rows = [0] * n
        for i, j in edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return cls(n, None, tuple(rows), None)

    @classmethod
    def from_matrix(cls, adj: np.ndarray, p: float | None = None, seed: int | None = None) -> "GraphInstance":
        adj = np.asarray(adj, dtype=bool)
        n = adj.shape[0]
        packed = np.packbits(adj, axis=1, bitorder="little")
        rows = tuple(int.from_bytes(r.tobytes(), "little") for r in packed)
        return cls(n, p, rows, seed)

    def adjacent(self, i: int, j: int) -> bool:
        return bool((self.rows[i] >> j) & 1)

    def matrix(self) -> np.ndarray:
        nbytes = (self.n + 7) // 8
        buf = np.frombuffer(b"".join(r.to_bytes(nbytes, "little") for r in self.rows), dtype=np.uint8)
        return np.unpackbits(buf.reshape(self.n, nbytes), axis=1, bitorder="little")[:, :self.n].astype(bool)

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edge_vector(self) -> np.ndarray:
        """Edge indicators in canonical pair order."""
        iu = np.triu_indices(self.n, 1)
        return self.matrix()[iu]

    def complement(self) -> "GraphInstance":
        full = (1 << self.n) - 1
        rows = tuple((full ^ r) & ~(1 << i) for i, r in enumerate(self.rows))
        p = None if self.p is None else 1.0 - self.p
        return GraphInstance(self.n, p, rows, None)

    def word_rows(self) -> np.ndarray:
        if self.n > 64:
            raise GuardError(f"n={self.n} exceeds the 64-node word limit")
        return np.array(self.rows, dtype=np.uint64)

    def manifest(self) -> dict:
        if self.seed is None:
            raise ValueError("only generated graphs have a manifest")
        return {"model": "gnp", "n": self.n, "p": self.p, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class KsatInstance:
    """CNF formula; literals are signed 1-based variable indices (DIMACS style)."""

    n: int
    k: int
    clauses: tuple[tuple[int, ...], ...]
    seed: int | None = None

    model = "ksat"

    @property
    def m(self) -> int:
        return len(self.clauses)

    @classmethod
    def from_clauses(cls, n: int, clauses) -> "KsatInstance":
        cl = tuple(tuple(int(x) for x in c) for c in clauses)
        for c in cl:
            for lit in c:
                if lit == 0 or abs(lit) > n:
                    raise ValueError(f"literal {lit} outside 1..{n}")
        k = max((len(c) for c in cl), default=0)
        return cls(n, k, cl, None)

    def manifest(self) -> dict:
        if self.seed is None:
            return {"model": "ksat", "n": self.n, "clauses": [list(c) for c in self.clauses]}
        return {"model": "ksat", "n": self.n, "m": self.m, "k": self.k, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class PSpinInstance:
    n: int
    p: int
    entries: np.ndarray
    seed: int | None = None

    model = "pspin"

    @classmethod
    def from_tensor(cls, tensor) -> "PSpinInstance":
        t = np.array(tensor, dtype=np.float64)
        return cls(t.shape[0], t.ndim, _frozen(t), None)

    def manifest(self) -> dict:
        if self.seed is None:
            raise ValueError("only generated tensors have a manifest")
        return {"model": "pspin", "n": self.n, "p": self.p, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class PerceptronInstance:
    n: int
    m: int
    kappa: float
    matrix: np.ndarray
    seed: int | None = None

    model = "perceptron"

    @classmethod
    def from_matrix(cls, matrix, kappa: float) -> "PerceptronInstance":
        x = np.array(matrix, dtype=np.float64)
        if kappa <= 0:
            raise ValueError("kappa must be positive")
        return cls(x.shape[1], x.shape[0], float(kappa), _frozen(x), None)

    def manifest(self) -> dict:
        if self.seed is None:
            raise ValueError("only generated instances have a manifest")
        return {"model": "perceptron", "n": self.n, "m": self.m, "kappa": self.kappa, "seed": self.seed}


def gen_npp(n: int, seed: int) -> NppInstance:
    if n < 1:
        raise ValueError("n must be positive")
    _check_seed(seed)
    return NppInstance(n, _frozen(RngStream(seed).normals(n)), seed)


def gnp_edges(n: int, p: float, rng: RngStream) -> np.ndarray:
    """Edge indicators for all pairs in canonical order."""
    return rng.uniform_block(n * (n - 1) // 2) < p


def gen_gnp(n: int, p: float, seed: int) -> GraphInstance:
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n > MAX_GRAPH_NODES:
        raise GuardError(f"n={n} exceeds the graph size guard {MAX_GRAPH_NODES}")
    _check_seed(seed)
    edges = gnp_edges(n, p, RngStream(seed))
    return graph_from_edge_vector(n, p, edges, seed)


def graph_from_edge_vector(n: int, p: float | None, edges: np.ndarray, seed: int | None) -> GraphInstance:
    adj = np.zeros((n, n), dtype=bool)
    iu = np.triu_indices(n, 1)
    adj[iu] = edges
    adj |= adj.T
    return GraphInstance.from_matrix(adj, p=p, seed=seed)


def draw_clause(rng: RngStream, n: int, k: int) -> tuple[int, ...]:
    chosen: list[int] = []
    while len(chosen) < k:
        v = rng.randbelow(n)
        if v not in chosen:
            chosen.append(v)
    return tuple(v + 1 if rng.bit() else -(v + 1) for v in chosen)


def gen_ksat(n: int, m: int, k: int, seed: int) -> KsatInstance:
    if n < 1 or m < 0 or k < 1:
        raise ValueError("need n >= 1, m >= 0, k >= 1")
    if k > n:
        raise ValueError("k must not exceed n")
    _check_seed(seed)
    rng = RngStream(seed)
    return KsatInstance(n, k, tuple(draw_clause(rng, n, k) for _ in range(m)), seed)


def gen_pspin(n: int, p: int, seed: int, max_entries: int = MAX_PSPIN_ENTRIES) -> PSpinInstance:
    if n < 1 or p < 1:
        raise ValueError("need n >= 1 and p >= 1")
    if n ** p > max_entries:
        raise GuardError(f"n^p = {n ** p} exceeds the tensor guard {max_entries}")
    _check_seed(seed)
    t = RngStream(seed).normals(n ** p).reshape((n,) * p)
    return PSpinInstance(n, p, _frozen(t), seed)


def gen_perceptron(n: int, m: int, kappa: float, seed: int) -> PerceptronInstance:
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if n * m > MAX_PERCEPTRON_ENTRIES:
        raise GuardError(f"m*n = {n * m} exceeds the matrix guard")
    _check_seed(seed)
    x = RngStream(seed).normals(m * n).reshape(m, n)
    return PerceptronInstance(n, m, float(kappa), _frozen(x), seed)


def from_manifest(d: dict):
    """Regenerate an instance from its manifest."""
    model = d["model"]
    if model == "npp":
        return gen_npp(d["n"], d["seed"]) if "seed" in d else NppInstance.from_weights(d["weights"])
    if model == "gnp":
        return gen_gnp(d["n"], d["p"], d["seed"])
    if model == "ksat":
        if "seed" in d:
            return gen_ksat(d["n"], d["m"], d["k"], d["seed"])
        return KsatInstance.from_clauses(d["n"], d["clauses"])
    if model == "pspin":
        return gen_pspin(d["n"], d["p"], d["seed"])
    if model == "perceptron":
        return gen_perceptron(d["n"], d["m"], d["kappa"], d["seed"])
    raise ValueError(f"unknown model {model!r}")


def _check(inst, s) -> None:
    if inst.n != s.n:
        raise DimensionError(f"dimension mismatch: instance {inst.n} vs solution {s.n}")


def npp_value(inst: NppInstance, s: SignVector) -> float:
    """|sum_i s_i w_i|."""
    _check(inst, s)
    return abs(float(np.dot(s.signs().astype(np.float64), inst.weights)))


def is_clique(g: GraphInstance, s: NodeSubset) -> bool:
    _check(g, s)
    bits = s.bits
    b, i = bits, 0
    while b:
        if b & 1:
            # every other member must be a neighbour of i
            if (bits & ~(1 << i)) & ~g.rows[i]:
                return False
        b >>= 1
        i += 1
    return True


def clique_size(s: NodeSubset) -> int:
    return s.size


def ksat_violations(f: KsatInstance, assignment: SignVector) -> int:
    """Number of clauses whose literals are all false (+1 means true)."""
    _check(f, assignment)
    bits = assignment.bits
    bad = 0
    for clause in f.clauses:
        for lit in clause:
            val = (bits >> (abs(lit) - 1)) & 1
            if (lit > 0) == bool(val):
                break
        else:
            bad += 1
    return bad


def pspin_energy(inst: PSpinInstance, s: SignVector) -> float:
    """sum over index tuples of J[i1..ip] * s_i1 * ... * s_ip."""
    _check(inst, s)
    return float(pspin_energies(inst, s.signs()[None, :])[0])


def pspin_energies(inst: PSpinInstance, signs: np.ndarray) -> np.ndarray:
    """Energies of a batch of sign rows (shape (B, n)); contracts the first index first."""
    S = np.asarray(signs, dtype=np.float64)
    n, p = inst.n, inst.p
    x = S @ inst.entries.reshape(n, -1)  # (B, n^(p-1))
    for _ in range(p - 1):
        x = x.reshape(len(S), n, -1)
        x = np.einsum("bi,bij->bj", S, x)
    return x.reshape(len(S))


def perceptron_margins(inst: PerceptronInstance, s: SignVector) -> np.ndarray:
    _check(inst, s)
    return inst.matrix @ s.signs().astype(np.float64)


def perceptron_feasible(inst: PerceptronInstance, s: SignVector) -> bool:
    return bool(np.all(np.abs(perceptron_margins(inst, s)) <= inst.kappa))


def instance_size(inst) -> int:
    """Number of resampleable coordinates of an instance."""
    if isinstance(inst, NppInstance):
        return inst.n
    if isinstance(inst, GraphInstance):
        return inst.n * (inst.n - 1) // 2
    if isinstance(inst, KsatInstance):
        return inst.m
    if isinstance(inst, PSpinInstance):
        return inst.entries.size
    if isinstance(inst, PerceptronInstance):
        return inst.matrix.size
    raise TypeError(type(inst).__name__)
