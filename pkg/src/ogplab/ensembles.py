"""Correlated instance paths, the stability harness, and the p-spin chaos probe.

A resample path starts from the generated instance ``xi_0`` and, at step
``t``, redraws coordinate ``order[t-1]`` from the base law. Every redraw is
keyed by (seed, branch, epoch, coordinate), so ``xi_t`` for any ``t`` is built
directly from the base instance and the first ``t`` entries of the order,
without replaying earlier steps.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .algorithms import greedy_clique, karmarkar_karp, walksat
from .core import NodeSubset, OverlapSpectrum, SignVector, build_spectrum, subset_overlap
from .models import (
    GraphInstance,
    GuardError,
    KsatInstance,
    NppInstance,
    PerceptronInstance,
    PSpinInstance,
    draw_clause,
    gen_gnp,
    gen_ksat,
    gen_npp,
    gen_perceptron,
    gen_pspin,
    graph_from_edge_vector,
    ksat_violations,
    npp_value,
    perceptron_feasible,
    pspin_energy,
)
from .oracles import (
    PSPIN_MAX_N,
    dpll_sat,
    enumerate_pspin,
    exact_max_clique,
    npp_optimum,
    pspin_landscape,
)
from .rng import RngStream, derive_seed, derive_seeds, first_words, words_to_uniform

MODELS = ("gnp", "npp", "ksat", "pspin", "perceptron")
RESAMPLE_EPOCH = 1


@dataclass(frozen=True)
class InterpolationPath:
    """Lazily materialized family ``xi_0 .. xi_T``.

    ``params`` holds the generator arguments: gnp ``n, p``; npp ``n``; ksat
    ``n, m, k``; pspin ``n, p``; perceptron ``n, m, kappa``. ``rule`` is
    ``"resample"`` (one coordinate per step) or, for npp and pspin,
    ``"rotate"`` (xi_t = cos(theta) xi_0 + sin(theta) xi', theta = pi t / 2T).
    Paths with different ``branch`` share ``xi_0`` and use independent
    redraws and orders.
    """

    model: str
    params: tuple[tuple[str, float], ...]
    seed: int
    order_seed: int
    branch: int = 0
    rule: str = "resample"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.rule not in ("resample", "rotate"):
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.rule == "rotate" and self.model not in ("npp", "pspin"):
            raise ValueError("the rotation rule applies to npp and pspin only")

    @property
    def kw(self) -> dict:
        return dict(self.params)

    @cached_property
    def base(self):
        kw = self.kw
        if self.model == "gnp":
            return gen_gnp(int(kw["n"]), kw["p"], self.seed)
        if self.model == "npp":
            return gen_npp(int(kw["n"]), self.seed)
        if self.model == "ksat":
            return gen_ksat(int(kw["n"]), int(kw["m"]), int(kw["k"]), self.seed)
        if self.model == "pspin":
            return gen_pspin(int(kw["n"]), int(kw["p"]), self.seed)
        return gen_perceptron(int(kw["n"]), int(kw["m"]), kw["kappa"], self.seed)

    @property
    def n(self) -> int:
        return self.base.n

    @cached_property
    def T(self) -> int:
        b = self.base
        if self.model == "gnp":
            return b.n * (b.n - 1) // 2
        if self.model == "npp":
            return b.n
        if self.model == "ksat":
            return b.m
        if self.model == "pspin":
            return b.entries.size
        return b.matrix.size

    @cached_property
    def order(self) -> np.ndarray:
        perm = RngStream(derive_seed(self.order_seed, self.branch)).permutation(self.T)
        perm.setflags(write=False)
        return perm

    def changed(self, t: int) -> int:
        """Coordinate redrawn between xi_{t-1} and xi_t."""
        if not 1 <= t <= self.T:
            raise ValueError(f"t={t} outside 1..{self.T}")
        return int(self.order[t - 1])

    def _fresh_seeds(self, coords: np.ndarray) -> np.ndarray:
        return derive_seeds(self.seed, self.branch, RESAMPLE_EPOCH, coords=coords)

    def _fresh_gaussians(self, coords) -> np.ndarray:
        return np.array(
            [RngStream(int(s)).normal() for s in self._fresh_seeds(np.asarray(coords))],
            dtype=np.float64,
        )

    def instance(self, t: int):
        if not 0 <= t <= self.T:
            raise ValueError(f"t={t} outside 0..{self.T}")
        b = self.base
        if self.rule == "rotate":
            return self._rotated(t)
        idx = np.sort(self.order[:t])
        if self.model == "gnp":
            edges = b.edge_vector()
            if t:
                u = words_to_uniform(first_words(self._fresh_seeds(idx)))
                edges[idx] = u < b.p
            return graph_from_edge_vector(b.n, b.p, edges, None)
        if self.model == "npp":
            w = np.array(b.weights)
            w[idx] = self._fresh_gaussians(idx)
            return NppInstance.from_weights(w)
        if self.model == "ksat":
            clauses = list(b.clauses)
            seeds = self._fresh_seeds(idx)
            for c, s in zip(idx, seeds):
                clauses[int(c)] = draw_clause(RngStream(int(s)), b.n, b.k)
            return KsatInstance(b.n, b.k, tuple(clauses), None)
        if self.model == "pspin":
            e = np.array(b.entries).reshape(-1)
            e[idx] = self._fresh_gaussians(idx)
            return PSpinInstance.from_tensor(e.reshape(b.entries.shape))
        x = np.array(b.matrix).reshape(-1)
        x[idx] = self._fresh_gaussians(idx)
        return PerceptronInstance.from_matrix(x.reshape(b.matrix.shape), b.kappa)

    @cached_property
    def _rotation_target(self) -> np.ndarray:
        return self._fresh_gaussians(np.arange(self.T))

    def _rotated(self, t: int):
        b = self.base
        theta = 0.5 * math.pi * t / self.T
        c, s = math.cos(theta), math.sin(theta)
        if t == 0:
            c, s = 1.0, 0.0
        elif t == self.T:
            c, s = 0.0, 1.0
        if self.model == "npp":
            return NppInstance.from_weights(c * b.weights + s * self._rotation_target)
        flat = c * b.entries.reshape(-1) + s * self._rotation_target
        return PSpinInstance.from_tensor(flat.reshape(b.entries.shape))

    def manifest(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "seed": self.seed,
            "order_seed": self.order_seed,
            "branch": self.branch,
            "rule": self.rule,
            "T": self.T,
        }


def _path(model: str, seed: int, order_seed: int, branch: int = 0, rule: str = "resample", **params) -> InterpolationPath:
    return InterpolationPath(model, tuple(sorted(params.items())), seed, order_seed, branch, rule)


def graph_resample_path(n: int, p: float, seed: int, order_seed: int, branch: int = 0) -> InterpolationPath:
    return _path("gnp", seed, order_seed, branch, n=n, p=p)


def npp_resample_path(n: int, seed: int, order_seed: int, branch: int = 0, rule: str = "resample") -> InterpolationPath:
    return _path("npp", seed, order_seed, branch, rule, n=n)


def ksat_resample_path(n: int, m: int, k: int, seed: int, order_seed: int, branch: int = 0) -> InterpolationPath:
    return _path("ksat", seed, order_seed, branch, n=n, m=m, k=k)


def pspin_resample_path(n: int, p: int, seed: int, order_seed: int, branch: int = 0, rule: str = "resample") -> InterpolationPath:
    return _path("pspin", seed, order_seed, branch, rule, n=n, p=p)


def perceptron_resample_path(n: int, m: int, kappa: float, seed: int, order_seed: int, branch: int = 0) -> InterpolationPath:
    return _path("perceptron", seed, order_seed, branch, n=n, m=m, kappa=kappa)


def branch_paths(path: InterpolationPath, m: int) -> list[InterpolationPath]:
    """m branches sharing ``xi_0``, each with its own redraws and order."""
    return [
        InterpolationPath(path.model, path.params, path.seed, path.order_seed, b, path.rule)
        for b in range(1, m + 1)
    ]


# --- named algorithms -------------------------------------------------------


@dataclass
class Algorithm:
    """A deterministic map from instances to solutions (None on failure)."""

    name: str
    solve: Callable
    objective: Callable
    params: dict = field(default_factory=dict)

    def __call__(self, inst):
        return self.solve(inst)


def make_algorithm(name: str, **params) -> Algorithm:
    """Build a named algorithm with fixed internal parameters.

    ``kk``, ``npp-opt`` (exhaustive optimum), ``greedy`` (``order_seed``),
    ``maxclique``, ``walksat`` (``seed``, ``max_flips``, ``noise``), ``dpll``,
    ``ground`` (p-spin ground state), ``constant``.
    """
    if name == "kk":
        return Algorithm(name, lambda inst: karmarkar_karp(inst).partition, npp_value, params)
    if name == "npp-opt":
        return Algorithm(name, lambda inst: npp_optimum(inst)[1].canonical(), npp_value, params)
    if name in ("greedy", "maxclique"):
        order_seed = params.get("order_seed")
        cache: dict[int, np.ndarray] = {}

        def order_for(n):
            if order_seed is None:
                return None
            if n not in cache:
                cache[n] = RngStream(order_seed).permutation(n)
            return cache[n]

        if name == "greedy":
            solve = lambda g: greedy_clique(g, order_for(g.n))
        else:
            solve = exact_max_clique
        return Algorithm(name, solve, lambda g, s: float(s.size), params)
    if name == "walksat":
        seed = int(params.get("seed", 0))
        max_flips = int(params.get("max_flips", 10_000))
        noise = float(params.get("noise", 0.5))
        return Algorithm(
            name,
            lambda f: walksat(f, max_flips, noise, RngStream(seed)).assignment,
            lambda f, s: float(ksat_violations(f, s)),
            params,
        )
    if name == "dpll":
        return Algorithm(name, lambda f: dpll_sat(f).witness, lambda f, s: float(ksat_violations(f, s)), params)
    if name == "ground":
        def ground(inst):
            codes, energies = pspin_landscape(inst)
            return SignVector(inst.n, int(codes[int(np.argmin(energies))]))
        return Algorithm(name, ground, pspin_energy, params)
    if name == "constant":
        def objective(inst, s):
            if isinstance(inst, NppInstance):
                return npp_value(inst, s)
            if isinstance(inst, PerceptronInstance):
                return 0.0 if perceptron_feasible(inst, s) else 1.0
            return 0.0
        return Algorithm(name, lambda inst: SignVector.ones(inst.n), objective, params)
    raise ValueError(f"unknown algorithm {name!r}")


# --- stability harness --------------------------------------------------------


def _distance(a, b) -> int:
    return (a.bits ^ b.bits).bit_count()


def _overlap(a, b) -> float:
    if isinstance(a, NodeSubset):
        return subset_overlap(a, b)
    return (a.n - 2 * _distance(a, b)) / a.n


@dataclass
class StabilityTrace:
    """Outputs of one algorithm along a path, at the evaluated steps ``ts``.

    ``distances[i]`` is the Hamming distance between the outputs at ``ts[i]``
    and ``ts[i+1]`` (None if either failed). ``overlaps[i]`` compares the
    output at ``ts[i]`` with the output at ``ts[0]``; for node subsets it is
    the cosine overlap of the indicator vectors.
    """

    algorithm: str
    n: int
    T: int
    stride: int
    ts: list[int]
    outputs: list
    objectives: list[float | None]
    status: list[str]

    @cached_property
    def distances(self) -> list[int | None]:
        out = []
        for a, b in zip(self.outputs, self.outputs[1:]):
            out.append(None if a is None or b is None else _distance(a, b))
        return out

    @cached_property
    def overlaps(self) -> list[float | None]:
        first = self.outputs[0] if self.outputs else None
        return [None if first is None or o is None else _overlap(first, o) for o in self.outputs]

    @property
    def kappa_hat(self) -> int:
        ds = [d for d in self.distances if d is not None]
        return max(ds) if ds else 0

    def crosses(self, gap_width: float) -> bool:
        """Whether some recorded step moved at least ``gap_width`` (distance units)."""
        return self.kappa_hat >= gap_width

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,d_t,o_t,objective,status\n")
        ds = self.distances + [None]
        for t, d, o, obj, st in zip(self.ts, ds, self.overlaps, self.objectives, self.status):
            buf.write(f"{t},{'' if d is None else d},{_num(o)},{_num(obj)},{st}\n")
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "T": self.T,
            "stride": self.stride,
            "points": len(self.ts),
            "failures": sum(1 for s in self.status if s != "ok"),
            "kappa_hat": self.kappa_hat,
            "o_start": self.overlaps[0] if self.overlaps else None,
            "o_end": self.overlaps[-1] if self.overlaps else None,
        }


def _num(v) -> str:
    return "" if v is None else format(float(v), ".12g")


def evaluation_points(T: int, stride: int | None) -> list[int]:
    if stride is None:
        stride = max(1, T // 200)
    if stride < 1:
        raise ValueError("stride must be at least 1")
    ts = list(range(0, T + 1, stride))
    if ts[-1] != T:
        ts.append(T)
    return ts


def stability_run(algorithm: Algorithm | Callable, path: InterpolationPath, stride: int | None = None) -> StabilityTrace:
    """Run ``algorithm`` on every ``stride``-th instance of ``path`` (and the last)."""
    ts = evaluation_points(path.T, stride)
    used_stride = stride if stride is not None else max(1, path.T // 200)
    objective = getattr(algorithm, "objective", None)
    outputs, objectives, status = [], [], []
    for t in ts:
        inst = path.instance(t)
        try:
            sol = algorithm(inst)
        except GuardError:
            raise
        except Exception as exc:  # noqa: BLE001 - recorded in the trace
            sol = None
            status.append(f"error:{type(exc).__name__}")
        else:
            status.append("ok" if sol is not None else "fail")
        outputs.append(sol)
        objectives.append(None if sol is None or objective is None else float(objective(inst, sol)))
    name = getattr(algorithm, "name", getattr(algorithm, "__name__", "algorithm"))
    return StabilityTrace(name, path.n, path.T, used_stride, ts, outputs, objectives, status)


# --- chaos probe ----------------------------------------------------------------


@dataclass
class ChaosReport:
    n: int
    p: int
    rho: float
    mu: float
    resampled: int
    sizes: tuple[int, int]
    mean_cross_overlap: float
    cross: OverlapSpectrum
    within: tuple[OverlapSpectrum, OverlapSpectrum]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "rho": self.rho,
            "mu": self.mu,
            "resampled": self.resampled,
            "sizes": list(self.sizes),
            "mean_cross_overlap": self.mean_cross_overlap,
            "cross": self.cross.to_dict(),
            "within": [w.to_dict() for w in self.within],
        }


def chaos_probe(n: int, p: int, seed: int, rho: float, mu: float, order_seed: int | None = None) -> ChaosReport:
    """Near ground states before and after redrawing a ``rho`` fraction of the couplings.

    Cross overlaps are taken modulo the global sign when ``p`` is even.
    """
    if n > PSPIN_MAX_N:
        raise GuardError(f"chaos probe needs n <= {PSPIN_MAX_N}, got {n}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    path = pspin_resample_path(n, p, seed, seed if order_seed is None else order_seed)
    t = int(round(rho * path.T))
    a = enumerate_pspin(path.instance(0), mu)
    b = enumerate_pspin(path.instance(t), mu)
    quotient = p % 2 == 0
    ca = np.array(a.codes, dtype=np.uint64)
    cb = np.array(b.codes, dtype=np.uint64)
    d = np.bitwise_count(ca[:, None] ^ cb[None, :]).astype(np.int64)
    vals = (n - 2 * d) / n
    if quotient:
        vals = np.abs(vals)
    ii, jj = np.indices(vals.shape)
    flat = vals.ravel()
    order = np.lexsort((jj.ravel(), ii.ravel(), flat))
    cross = OverlapSpectrum(
        values=flat[order],
        pairs=np.stack([ii.ravel(), jj.ravel()], axis=1)[order],
        mode="overlap",
        n=n,
        quotient=quotient,
    )
    within = (
        build_spectrum(a, "overlap", quotient),
        build_spectrum(b, "overlap", quotient),
    )
    return ChaosReport(n, p, rho, mu, t, (len(a), len(b)), float(flat.mean()), cross, within)


def trace_summary_json(trace: StabilityTrace, extra: dict | None = None) -> str:
    d = trace.summary()
    if extra:
        d.update(extra)
    return json.dumps(d, sort_keys=True)
