"""p-stable hashing for L2 distance: ``h(x) = floor((a.x + b) / r)``.

Randomness comes from Philox (counter-based) generators keyed by a
:class:`HashSeed`, so any (seed, stream) pair reproduces the same hash
functions bit for bit. Projection directions and offsets are drawn from
separate sub-streams, which makes the first ``k`` functions of a bank
independent of how many are requested in total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class HashSeed:
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")

    def generator(self, *path: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *path))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class L2HashFunction:
    a: np.ndarray
    b: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("bucket width r must be positive")
        if not 0.0 <= self.b < self.r:
            raise ValueError("offset b must lie in [0, r)")


@dataclass(frozen=True, eq=False)
class HashBank:
    """``count`` hash functions sharing one bucket width, stored as arrays.

    ``A`` has shape (count, dim) and ``b`` shape (count,).
    """

    A: np.ndarray
    b: np.ndarray
    r: float

    def __len__(self) -> int:
        return self.A.shape[0]

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def __getitem__(self, i: int) -> L2HashFunction:
        return L2HashFunction(self.A[i], float(self.b[i]), self.r)

    def hash(self, X) -> np.ndarray:
        """Hash values of one vector (shape (count,)) or rows of X (shape (n, count))."""
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.dim:
            raise ValueError(f"dimension mismatch: {X.shape[-1]} vs {self.dim}")
        return np.floor((X @ self.A.T + self.b) / self.r).astype(np.int64)


def sample_bank(dim: int, r: float, seed: HashSeed, count: int, *path: int) -> HashBank:
    """Draw ``count`` functions; ``path`` selects an independent sub-stream."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not r > 0:
        raise ValueError("bucket width r must be positive")
    A = seed.generator(*path, 0).standard_normal((count, dim))
    b = seed.generator(*path, 1).uniform(0.0, r, size=count)
    return HashBank(A, b, float(r))


def sample_hash(dim: int, r: float, seed: HashSeed) -> L2HashFunction:
    return sample_bank(dim, r, seed, 1)[0]


def hash_value(h: L2HashFunction, x) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != h.a.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {h.a.shape}")
    return int(math.floor((float(np.dot(h.a, x)) + h.b) / h.r))


def normal_cdf(x):
    """Standard normal CDF through erfc (accurate in both tails)."""
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) / _SQRT2)


def collision_probability(d, r):
    """Probability ``F_r(d)`` that two points at distance ``d`` share a bucket.

    Vectorised over ``d`` and ``r``. Raises for ``d <= 0``; identical points
    collide with probability 1 and callers should special-case them.
    """
    d = np.asarray(d, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    if np.any(r <= 0):
        raise ValueError("bucket width r must be positive")
    s = r / d
    out = 1.0 - 2.0 * normal_cdf(-s) - 2.0 / (_SQRT2PI * s) * (1.0 - np.exp(-0.5 * s * s))
    return out if out.ndim else float(out)


def empirical_collision_rate(x, y, r: float, trials: int, seed: HashSeed) -> tuple[float, float]:
    """Fraction of ``trials`` sampled hash functions with ``h(x) == h(y)``.

    Returns the rate and its binomial standard error.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    bank = sample_bank(x.shape[0], r, seed, trials)
    hits = int(np.count_nonzero(bank.hash(x) == bank.hash(y)))
    p = hits / trials
    return p, math.sqrt(max(p * (1.0 - p), 1e-300) / trials)
