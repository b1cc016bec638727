"""Counter-based splitmix64 randomness.

Every random quantity in the package is derived from :class:`RngStream`, so
instances regenerate bit-identically from their seed on any platform.

Word ``i`` (1-based) of a stream with seed ``s`` is ``mix64(s + i * GOLDEN)``,
which is exactly the classic splitmix64 sequence started from state ``s``.
Uniform doubles keep the top 53 bits. Gaussians use the cosine branch of
Box-Muller on two consecutive words, one Gaussian per pair.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TWO_NEG53 = 1.0 / (1 << 53)

_G = np.uint64(GOLDEN)
_M1 = np.uint64(MIX1)
_M2 = np.uint64(MIX2)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for the sub-stream addressed by ``keys``.

    Used for per-coordinate resample draws keyed by (seed, coordinate, epoch).
    """
    h = mix64(seed ^ 0x5851F42D4C957F2D)
    for k in keys:
        h = mix64(((h ^ mix64((k + GOLDEN) & MASK64)) + GOLDEN) & MASK64)
    return h


def derive_seeds(seed: int, *prefix: int, coords: np.ndarray) -> np.ndarray:
    """Vectorized :func:`derive_seed` with ``coords`` as the final key."""
    h = derive_seed(seed, *prefix) if prefix else mix64(seed ^ 0x5851F42D4C957F2D)
    c = np.asarray(coords, dtype=np.uint64)
    return mix64_array((np.uint64(h) ^ mix64_array(c + _G)) + _G)


def first_words(seeds: np.ndarray) -> np.ndarray:
    """First output word of each stream in ``seeds``."""
    return mix64_array(np.asarray(seeds, dtype=np.uint64) + _G)


def words_to_uniform(words: np.ndarray) -> np.ndarray:
    return (np.asarray(words, dtype=np.uint64) >> _S11).astype(np.float64) * TWO_NEG53


class RngStream:
    """Sequential splitmix64 stream; single owner, advanced in place."""

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.counter = counter

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, counter={self.counter})"

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.seed + self.counter * GOLDEN)

    def u64_block(self, count: int) -> np.ndarray:
        """The next ``count`` words as a uint64 array (same values as repeated next_u64)."""
        idx = np.arange(self.counter + 1, self.counter + 1 + count, dtype=np.uint64)
        self.counter += count
        return mix64_array(np.uint64(self.seed & MASK64) + idx * _G)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * TWO_NEG53

    def uniform_block(self, count: int) -> np.ndarray:
        return words_to_uniform(self.u64_block(count))

    def bit(self) -> int:
        return self.next_u64() >> 63

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            w = self.next_u64()
            if w < limit:
                return w % n

    def normal(self) -> float:
        u1 = ((self.next_u64() >> 11) + 1) * TWO_NEG53
        u2 = (self.next_u64() >> 11) * TWO_NEG53
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, count: int) -> np.ndarray:
        # scalar libm path on purpose: numpy's SIMD log/cos may differ in the last ulp
        return np.array([self.normal() for _ in range(count)], dtype=np.float64)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of 0..n-1."""
        perm = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm
