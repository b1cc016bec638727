"""Solution vectors, overlap arithmetic, spectra and gap detection.

Solutions are bit-packed into Python integers: for a :class:`SignVector`
bit ``i`` is set iff ``sigma_i = +1``; for a :class:`NodeSubset` bit ``i`` is
set iff node ``i`` is included. Unused high bits are always zero, so equality
and hashing are plain integer comparisons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._kernels import kernels


class DimensionError(ValueError):
    """Two solutions (or a solution and an instance) disagree on dimension."""


@dataclass(frozen=True)
class SignVector:
    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("bits outside the n low positions")

    @classmethod
    def from_signs(cls, signs: Iterable[int]) -> "SignVector":
        signs = list(signs)
        bits = 0
        for i, s in enumerate(signs):
            if s == 1:
                bits |= 1 << i
            elif s != -1:
                raise ValueError(f"entry {i} is {s}, expected +1 or -1")
        return cls(len(signs), bits)

    @classmethod
    def ones(cls, n: int) -> "SignVector":
        return cls(n, (1 << n) - 1)

    def signs(self) -> np.ndarray:
        idx = np.arange(self.n)
        on = np.array([(self.bits >> int(i)) & 1 for i in idx], dtype=np.int8)
        return (2 * on - 1).astype(np.int8)

    def __neg__(self) -> "SignVector":
        return SignVector(self.n, self.bits ^ ((1 << self.n) - 1))

    def flip(self, i: int) -> "SignVector":
        return SignVector(self.n, self.bits ^ (1 << i))

    def canonical(self) -> "SignVector":
        """Representative of {s, -s} with the first coordinate +1."""
        return self if self.bits & 1 else -self

    def hex(self) -> str:
        return format(self.bits, "x")

    def __len__(self) -> int:
        return self.n

    def __str__(self) -> str:
        return "".join("+" if (self.bits >> i) & 1 else "-" for i in range(self.n))


@dataclass(frozen=True)
class NodeSubset:
    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("bits outside the n low positions")

    @classmethod
    def from_nodes(cls, n: int, nodes: Iterable[int]) -> "NodeSubset":
        bits = 0
        for v in nodes:
            if not 0 <= v < n:
                raise ValueError(f"node {v} outside 0..{n - 1}")
            bits |= 1 << v
        return cls(n, bits)

    def nodes(self) -> list[int]:
        out, b, i = [], self.bits, 0
        while b:
            if b & 1:
                out.append(i)
            b >>= 1
            i += 1
        return out

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def hex(self) -> str:
        return format(self.bits, "x")

    def __len__(self) -> int:
        return self.n


def _check_dims(a, b) -> None:
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")


def hamming(a: SignVector | NodeSubset, b: SignVector | NodeSubset) -> int:
    _check_dims(a, b)
    return (a.bits ^ b.bits).bit_count()


def overlap(a: SignVector, b: SignVector) -> float:
    """Scaled inner product <a, b> / n."""
    _check_dims(a, b)
    return (a.n - 2 * (a.bits ^ b.bits).bit_count()) / a.n


def intersection(a: NodeSubset, b: NodeSubset) -> int:
    _check_dims(a, b)
    return (a.bits & b.bits).bit_count()


def subset_overlap(a: NodeSubset, b: NodeSubset) -> float:
    """Cosine of the two indicator vectors, |a & b| / sqrt(|a| |b|); 0 if either is empty."""
    _check_dims(a, b)
    sa, sb = a.size, b.size
    if sa == 0 or sb == 0:
        return 0.0
    return (a.bits & b.bits).bit_count() / float(np.sqrt(sa * sb))


@dataclass
class SolutionSet:
    """Enumerated solutions with objective value at most ``threshold``.

    ``kind`` is ``"sign"`` for {-1,+1}^n solutions and ``"subset"`` for node
    sets. Solutions are stored as bit codes with their objective values.
    """

    model: str
    n: int
    threshold: float
    codes: list[int]
    values: list[float]
    kind: str = "sign"
    truncated: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.codes) != len(self.values):
            raise ValueError("codes and values differ in length")
        if len(set(self.codes)) != len(self.codes):
            raise ValueError("duplicate solutions")
        if self.kind not in ("sign", "subset"):
            raise ValueError(f"unknown kind {self.kind!r}")

    def __len__(self) -> int:
        return len(self.codes)

    def solutions(self) -> list[SignVector | NodeSubset]:
        cls = SignVector if self.kind == "sign" else NodeSubset
        return [cls(self.n, c) for c in self.codes]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "kind": self.kind,
            "n": self.n,
            "threshold": self.threshold,
            "truncated": self.truncated,
            "params": self.params,
            "count": len(self.codes),
            "solutions": [format(c, "x") for c in self.codes],
            "values": [float(v) for v in self.values],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolutionSet":
        return cls(
            model=d["model"],
            n=d["n"],
            threshold=d["threshold"],
            codes=[int(h, 16) for h in d["solutions"]],
            values=list(d["values"]),
            kind=d.get("kind", "sign"),
            truncated=d.get("truncated", False),
            params=d.get("params", {}),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SolutionSet":
        return cls.from_dict(json.loads(text))


@dataclass
class OverlapSpectrum:
    """Sorted pairwise overlaps (or intersection sizes) of a solution set.

    ``pairs[k]`` holds the indices into the source set of the pair giving
    ``values[k]``.
    """

    values: np.ndarray
    pairs: np.ndarray
    mode: str
    n: int
    quotient: bool = False
    mu: float | None = None
    warning: str | None = None

    def __len__(self) -> int:
        return len(self.values)

    def histogram(self, bins: int | Sequence[float] | None = None) -> tuple[np.ndarray, np.ndarray]:
        if bins is None:
            if self.mode == "overlap":
                # one bin per attainable lattice value k/n
                half = 1.0 / self.n
                bins = np.linspace(-1 - half, 1 + half, self.n + 2)
            else:
                top = int(self.values.max()) if len(self.values) else 0
                bins = np.arange(-0.5, top + 1.5, 1.0)
        counts, edges = np.histogram(self.values, bins=bins)
        return edges, counts

    def to_dict(self) -> dict:
        edges, counts = self.histogram()
        nz = counts > 0
        centers = 0.5 * (edges[:-1] + edges[1:])
        return {
            "mode": self.mode,
            "n": self.n,
            "quotient": self.quotient,
            "pairs": int(len(self.values)),
            "warning": self.warning,
            "bins": [[round(float(c), 12), int(k)] for c, k in zip(centers[nz], counts[nz])],
        }


def _as_code_array(codes: Sequence[int], n: int):
    if n <= 64:
        return np.fromiter(codes, dtype=np.uint64, count=len(codes))
    return None


def pairwise_distances(codes: Sequence[int], n: int) -> np.ndarray:
    """Hamming distances for all pairs i < j in row-major pair order."""
    arr = _as_code_array(codes, n)
    if arr is not None:
        return kernels.pairwise_hamming(arr)
    k = len(codes)
    out = np.empty(k * (k - 1) // 2, dtype=np.int64)
    pos = 0
    for i in range(k):
        ci = codes[i]
        for j in range(i + 1, k):
            out[pos] = (ci ^ codes[j]).bit_count()
            pos += 1
    return out


def _pair_index(k: int) -> np.ndarray:
    i, j = np.triu_indices(k, 1)
    return np.stack([i, j], axis=1)


def build_spectrum(
    sset: SolutionSet,
    mode: str = "overlap",
    quotient_global_sign: bool = False,
) -> OverlapSpectrum:
    """All pairwise overlaps of ``sset``.

    ``mode="overlap"`` gives scaled inner products for sign solutions;
    ``mode="intersection"`` gives raw intersection sizes for node subsets.
    With ``quotient_global_sign`` each pair contributes ``|overlap|``, the
    best over the sign choices of both members.
    """
    if mode not in ("overlap", "intersection"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "overlap" and sset.kind != "sign":
        raise ValueError("overlap mode needs sign solutions")
    if mode == "intersection" and sset.kind != "subset":
        raise ValueError("intersection mode needs node-subset solutions")
    k = len(sset)
    mu = sset.threshold
    if k < 2:
        return OverlapSpectrum(
            values=np.empty(0),
            pairs=np.empty((0, 2), dtype=np.int64),
            mode=mode,
            n=sset.n,
            quotient=quotient_global_sign,
            mu=mu,
            warning="fewer than two solutions; spectrum is empty",
        )
    pairs = _pair_index(k)
    if mode == "overlap":
        d = pairwise_distances(sset.codes, sset.n)
        vals = (sset.n - 2 * d) / sset.n
        if quotient_global_sign:
            vals = np.abs(vals)
    else:
        if sset.n <= 64:
            arr = np.fromiter(sset.codes, dtype=np.uint64, count=k)
            vals = kernels.pairwise_intersections(arr).astype(np.float64)
        else:
            vals = np.array(
                [(sset.codes[i] & sset.codes[j]).bit_count() for i, j in pairs],
                dtype=np.float64,
            )
    # ties broken by pair index so the order does not depend on the sort algorithm
    order = np.lexsort((pairs[:, 1], pairs[:, 0], vals))
    return OverlapSpectrum(
        values=vals[order],
        pairs=pairs[order],
        mode=mode,
        n=sset.n,
        quotient=quotient_global_sign,
        mu=mu,
    )


def spectrum_from_values(values: Iterable[float], n: int = 1, mode: str = "overlap") -> OverlapSpectrum:
    vals = np.sort(np.asarray(list(values), dtype=np.float64))
    return OverlapSpectrum(
        values=vals,
        pairs=np.full((len(vals), 2), -1, dtype=np.int64),
        mode=mode,
        n=n,
    )


@dataclass
class GapReport:
    """Widest forbidden overlap interval (nu1, nu2) found in a spectrum.

    ``nu1``/``nu2`` are in the spectrum's own units (``units``). For overlap
    spectra the equivalent Hamming-distance interval is given by
    ``dist_lo``/``dist_hi``: overlap above ``nu2`` means distance below
    ``dist_lo``, overlap below ``nu1`` means distance above ``dist_hi``.
    """

    mu: float | None
    nu1: float | None
    nu2: float | None
    present: bool
    units: str = "overlap"
    witness_below: tuple[int, int] | None = None
    witness_above: tuple[int, int] | None = None
    dist_lo: float | None = None
    dist_hi: float | None = None
    all_gaps: list[tuple[float, float]] | None = None

    @property
    def width(self) -> float:
        return (self.nu2 - self.nu1) if self.present else 0.0

    def to_dict(self) -> dict:
        d = {
            "mu": self.mu,
            "nu1": self.nu1,
            "nu2": self.nu2,
            "present": self.present,
            "units": self.units,
            "witness_below": list(self.witness_below) if self.witness_below else None,
            "witness_above": list(self.witness_above) if self.witness_above else None,
            "distance_units": {"lo": self.dist_lo, "hi": self.dist_hi},
        }
        if self.all_gaps is not None:
            d["all_gaps"] = [list(g) for g in self.all_gaps]
        return d


def detect_gap(
    spec: OverlapSpectrum,
    min_width: float,
    search_floor: float = -1.0,
    include_self: bool = False,
    verbose: bool = False,
) -> GapReport:
    """Widest empty open interval between attained spectrum values.

    Candidate gaps lie between consecutive distinct values ``a < b`` with
    ``b > search_floor``; the lower end is clipped to ``search_floor``. With
    ``include_self`` the self-overlap 1.0 (``sigma = tau``) counts as an
    attained value, so a gap just below 1.0 can be reported for a set of
    distinct solutions. Ties in width go to the interval nearest the top.
    """
    units = spec.mode
    if not 0 < min_width < 2 and units == "overlap":
        raise ValueError("min_width must lie in (0, 2) for overlap spectra")
    vals = np.asarray(spec.values, dtype=np.float64)
    if include_self:
        vals = np.append(vals, 1.0)
    absent = GapReport(mu=spec.mu, nu1=None, nu2=None, present=False, units=units,
                       all_gaps=[] if verbose else None)
    if len(vals) == 0:
        return absent
    distinct = np.unique(vals)
    if len(distinct) < 2:
        return absent
    lo = np.maximum(distinct[:-1], search_floor)
    hi = distinct[1:]
    width = hi - lo
    ok = (hi > search_floor) & (width >= min_width)
    if not ok.any():
        return absent
    cand = np.flatnonzero(ok)
    # widest; among equal widths (to rounding) the highest interval
    best = cand[np.lexsort((-hi[cand], -np.round(width[cand], 9)))[0]]
    nu1, nu2 = float(lo[best]), float(hi[best])
    below = above = None
    real = np.asarray(spec.values)
    if len(real):
        idx_below = np.flatnonzero(real <= nu1)
        if len(idx_below):
            below = tuple(int(x) for x in spec.pairs[idx_below[-1]])
        idx_above = np.flatnonzero(real >= nu2)
        if len(idx_above):
            above = tuple(int(x) for x in spec.pairs[idx_above[0]])
    dist_lo = dist_hi = None
    if units == "overlap":
        dist_lo = spec.n * (1 - nu2) / 2
        dist_hi = spec.n * (1 - nu1) / 2
    gaps = None
    if verbose:
        gaps = [(float(lo[i]), float(hi[i])) for i in cand]
    return GapReport(
        mu=spec.mu,
        nu1=nu1,
        nu2=nu2,
        present=True,
        units=units,
        witness_below=below,
        witness_above=above,
        dist_lo=dist_lo,
        dist_hi=dist_hi,
        all_gaps=gaps,
    )
