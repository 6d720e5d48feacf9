"""Asymmetric preprocessing (P) and query (Q) transformations.

Items are shrunk so every norm is at most ``U < 1``, then P appends the
norm powers ``||x||^2, ||x||^4, ..., ||x||^(2^m)``. Queries are normalised
and Q appends ``m`` halves. Under these maps

    ||Q(q) - P(x)||^2 = (1 + m/4) - 2 q.x + ||x||^(2^(m+1))

so L2 near-neighbour search on the transformed vectors ranks items by
inner product up to the vanishing last term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, as_vector

NORM_TOL = 1e-12


@dataclass(frozen=True)
class TransformParams:
    m: int = 3
    U: float = 0.83

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if not 0.0 < self.U < 1.0:
            raise ValueError(f"U must lie in (0, 1), got {self.U}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "U", float(self.U))

    @property
    def error_bound(self) -> float:
        """Largest possible value of the correction term, U^(2^(m+1))."""
        return tower_power(self.U**2, self.m)


@dataclass(frozen=True, eq=False)
class ScaledDataset:
    base: Dataset
    scale_factor: float
    params: TransformParams


def tower_power(s, m: int):
    """Return ``s^(2^m)`` by ``m`` repeated squarings."""
    for _ in range(m):
        s = s * s
    return s


def scale_dataset(ds: Dataset, params: TransformParams) -> ScaledDataset:
    """Divide every item by ``max_norm / U`` when ``max_norm`` exceeds U."""
    if len(ds) == 0:
        raise ValueError("cannot scale an empty dataset")
    if ds.max_norm == 0.0:
        raise ValueError("all-zero dataset: scale factor undefined")
    factor = ds.max_norm / params.U if ds.max_norm > params.U else 1.0
    base = Dataset(ds.vectors / factor, ds.ids) if factor != 1.0 else ds
    return ScaledDataset(base, float(factor), params)


def normalize_query(q) -> np.ndarray:
    q = as_vector(q, "query")
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("zero query cannot be normalised")
    return q / n


def _norm_powers(sq_norms: np.ndarray, m: int) -> np.ndarray:
    out = np.empty(sq_norms.shape + (m,), dtype=np.float64)
    s = sq_norms
    for i in range(m):
        out[..., i] = s
        s = s * s
    return out


def transform_p(x, params: TransformParams) -> np.ndarray:
    """Item-side map ``[x; ||x||^2; ||x||^4; ...; ||x||^(2^m)]``.

    Accepts a single vector or a 2-D array of row vectors. Norms must not
    exceed 1, otherwise the appended powers explode; callers normally run
    :func:`scale_dataset` first so norms are at most U.
    """
    x = np.asarray(x, dtype=np.float64)
    sq = np.einsum("...i,...i->...", x, x)
    if np.any(sq > (1.0 + NORM_TOL) ** 2):
        raise ValueError("transform_p requires ||x|| <= 1; scale the dataset first")
    return np.concatenate([x, _norm_powers(sq, params.m)], axis=-1)


def transform_q(x, params: TransformParams) -> np.ndarray:
    """Query-side map ``[x; 1/2; ...; 1/2]`` (``m`` halves)."""
    x = np.asarray(x, dtype=np.float64)
    halves = np.full(x.shape[:-1] + (params.m,), 0.5)
    return np.concatenate([x, halves], axis=-1)


def transformed_distance_sq(q, x, params: TransformParams):
    """Analytic ``||Q(q) - P(x)||^2`` for unit ``q`` and ``||x|| <= 1``.

    Broadcasts over leading axes of ``x`` (e.g. all items against one query).
    """
    q = np.asarray(q, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    sq = np.einsum("...i,...i->...", x, x)
    if np.any(sq > (1.0 + NORM_TOL) ** 2):
        raise ValueError("transformed distance requires ||x|| <= 1")
    ip = np.einsum("...i,...i->...", x, q)
    return (1.0 + params.m / 4.0) - 2.0 * ip + tower_power(sq, params.m)
