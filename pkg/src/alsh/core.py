"""Dense vector primitives, the dataset container and exact top-T oracles.

Vectors are plain 1-D ``float64`` numpy arrays. A :class:`Dataset` stacks
them row-wise and carries item ids plus the cached maximum L2 norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Validate and coerce ``x`` to a finite, non-empty 1-D float64 array."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {v.shape}")
    if v.size == 0:
        raise ValueError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains NaN or Inf")
    return v


def inner_product(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.dot(x, y))


def l2_norm(x) -> float:
    return float(np.linalg.norm(np.asarray(x, dtype=np.float64)))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Row-stacked item vectors with opaque integer ids.

    Build through :meth:`from_array`, which validates the rows and freezes
    the underlying arrays.
    """

    vectors: np.ndarray
    ids: np.ndarray
    max_norm: float = field(init=False)

    def __post_init__(self):
        X = np.asarray(self.vectors, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] < 1:
            raise ValueError(f"vectors must be a 2-D array with D >= 1, got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("dataset contains NaN or Inf")
        ids = np.asarray(self.ids, dtype=np.int64)
        if ids.shape != (X.shape[0],):
            raise ValueError("ids must have one entry per vector")
        if np.any(ids < 0):
            raise ValueError("item ids must be non-negative")
        if np.unique(ids).size != ids.size:
            raise ValueError("item ids must be distinct")
        X = X.copy()
        ids = ids.copy()
        X.flags.writeable = False
        ids.flags.writeable = False
        object.__setattr__(self, "vectors", X)
        object.__setattr__(self, "ids", ids)
        norms = np.linalg.norm(X, axis=1)
        object.__setattr__(self, "max_norm", float(norms.max()) if norms.size else 0.0)

    @classmethod
    def from_array(cls, X, ids=None) -> "Dataset":
        X = np.asarray(X, dtype=np.float64)
        if ids is None:
            ids = np.arange(X.shape[0] if X.ndim == 2 else 0)
        return cls(X, ids)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    def positions(self, ids) -> np.ndarray:
        """Map item ids to row positions; raises KeyError on unknown ids."""
        ids = np.asarray(ids, dtype=np.int64)
        order = np.argsort(self.ids, kind="stable")
        sorted_ids = self.ids[order]
        pos = np.searchsorted(sorted_ids, ids)
        pos = np.clip(pos, 0, len(sorted_ids) - 1)
        if ids.size and not np.array_equal(sorted_ids[pos], ids):
            missing = ids[sorted_ids[pos] != ids]
            raise KeyError(f"unknown item ids: {missing[:5].tolist()}")
        return order[pos]


@dataclass(frozen=True, eq=False)
class TopTResult:
    ids: np.ndarray
    scores: np.ndarray
    T: int

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.ids.tolist(), self.scores.tolist()))

    def __len__(self) -> int:
        return len(self.ids)


def top_t_of(ids: np.ndarray, scores: np.ndarray, T: int) -> TopTResult:
    """Top-T by score descending, ties broken by smaller id."""
    if T < 1:
        raise ValueError("T must be a positive integer")
    order = np.lexsort((ids, -scores))[:T]
    return TopTResult(ids[order].copy(), scores[order].copy(), T)


def brute_force_top_t(q, ds: Dataset, T: int) -> TopTResult:
    """Exact top-T items of ``ds`` by inner product with ``q``."""
    if len(ds) == 0:
        raise ValueError("empty dataset")
    q = as_vector(q, "query")
    if q.shape[0] != ds.dim:
        raise ValueError(f"dimension mismatch: query {q.shape[0]} vs dataset {ds.dim}")
    return top_t_of(ds.ids, ds.vectors @ q, T)
