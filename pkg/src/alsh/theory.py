"""Collision bounds of the ALSH scheme and the query-time exponent rho.

For an instance with threshold ``S0`` and ratio ``c``:

    p1 = F_r(sqrt(1 + m/4 - 2 S0 + U^(2^(m+1))))
    p2 = F_r(sqrt(1 + m/4 - 2 c S0))
    rho = log p1 / log p2

which is only meaningful (``p1 > p2``) when ``c < 1 - U^(2^(m+1)) / (2 S0)``.
:func:`rho_star` minimises rho over a (U, m, r) grid under that constraint.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .l2lsh import collision_probability, empirical_collision_rate
from .transforms import TransformParams, normalize_query, tower_power, transform_p, transform_q

log = logging.getLogger(__name__)


class InfeasibleError(ValueError):
    """Raised when ``c < 1 - U^(2^(m+1)) / (2 S0)`` does not hold."""


@dataclass(frozen=True)
class MipsInstance:
    """A c-approximate MIPS instance.

    With ``relative=True`` the threshold is ``s0 * U`` for whichever U is
    being evaluated, so ``s0`` is a fraction in (0, 1].
    """

    c: float
    s0: float
    relative: bool = False

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError("c must lie in (0, 1)")
        if not self.s0 > 0:
            raise ValueError("S0 must be positive")
        if self.relative and self.s0 > 1.0:
            raise ValueError("relative S0 must be a fraction of U in (0, 1]")

    def threshold(self, U):
        return self.s0 * np.asarray(U) if self.relative else np.full(np.shape(U), self.s0)


@dataclass(frozen=True)
class Grid:
    U: tuple[float, ...] = tuple(np.round(np.arange(0.50, 0.951, 0.05), 10).tolist())
    m: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    r: tuple[float, ...] = tuple(np.round(np.arange(0.5, 5.01, 0.5), 10).tolist())

    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (m, U, r) arrays in lexicographic (m, U, r) order."""
        M, U, R = np.meshgrid(
            np.asarray(self.m, dtype=np.int64),
            np.asarray(self.U, dtype=np.float64),
            np.asarray(self.r, dtype=np.float64),
            indexing="ij",
        )
        return U.ravel(), M.ravel(), R.ravel()

    def describe(self) -> str:
        return f"U={list(self.U)} m={list(self.m)} r={list(self.r)}"


DEFAULT_GRID = Grid()


@dataclass(frozen=True)
class RhoSearchResult:
    rho_star: float
    best_U: float
    best_m: int
    best_r: float
    grid_spec: str = field(default="", compare=False)


def recommended_params() -> tuple[TransformParams, float]:
    return TransformParams(m=3, U=0.83), 2.5


def _error_term(U, m):
    """``U^(2^(m+1))`` by repeated squaring, elementwise over arrays of m."""
    m = np.asarray(m)
    s = np.asarray(U, dtype=np.float64) ** 2
    if m.ndim == 0:
        return tower_power(s, int(m))
    s = np.broadcast_to(s, m.shape).copy()
    for k in range(int(m.max())):
        s = np.where(k < m, s * s, s)
    return s


def _radicand_check(rad, what):
    if np.any(rad <= 0):
        raise ValueError(f"{what}: non-positive squared distance, degenerate instance")


def p1_bound(S0, U, m, r):
    """Lower bound on the collision probability when ``q.x >= S0``."""
    rad = 1.0 + m / 4.0 - 2.0 * S0 + _error_term(U, m)
    _radicand_check(rad, "p1_bound")
    return collision_probability(np.sqrt(rad), r)


def p2_bound(S0, c, m, r):
    """Upper bound on the collision probability when ``q.x <= c S0``."""
    rad = 1.0 + m / 4.0 - 2.0 * c * S0
    _radicand_check(rad, "p2_bound")
    return collision_probability(np.sqrt(rad), r)


def feasible(S0, c, U, m):
    """Elementwise ``U^(2^(m+1)) / (2 S0) < 1 - c``."""
    return _error_term(U, m) / (2.0 * S0) < 1.0 - c


def rho(S0: float, c: float, U: float, m: int, r: float) -> float:
    if not feasible(S0, c, U, m):
        bound = 1.0 - float(_error_term(U, m)) / (2.0 * S0)
        raise InfeasibleError(
            f"need c < 1 - U^(2^(m+1))/(2 S0) = {bound:.6g}, got c={c} (U={U}, m={m}, S0={S0})"
        )
    return float(np.log(p1_bound(S0, U, m, r)) / np.log(p2_bound(S0, c, m, r)))


def rho_grid(instance: MipsInstance, grid: Grid = DEFAULT_GRID):
    """Evaluate rho at every grid point; infeasible points are ``inf``.

    Returns ``(U, m, r, rho)`` flat arrays in (m, U, r) order.
    """
    U, m, r = grid.points()
    S0 = instance.threshold(U)
    ok = feasible(S0, instance.c, U, m) & (S0 <= U)
    out = np.full(U.shape, np.inf)
    if ok.any():
        p1 = p1_bound(S0[ok], U[ok], m[ok], r[ok])
        p2 = p2_bound(S0[ok], instance.c, m[ok], r[ok])
        out[ok] = np.log(p1) / np.log(p2)
    return U, m, r, out


def rho_star(instance: MipsInstance, grid: Grid = DEFAULT_GRID) -> RhoSearchResult:
    """Exhaustive constrained minimum of rho over ``grid``.

    Ties resolve to the smallest m, then U, then r.
    """
    U, m, r, values = rho_grid(instance, grid)
    if not np.isfinite(values).any():
        raise InfeasibleError(
            f"no grid point satisfies c < 1 - U^(2^(m+1))/(2 S0) for c={instance.c}, S0={instance.s0}"
            + (" * U" if instance.relative else "")
        )
    best = values.min()
    tied = np.flatnonzero(values == best)
    i = tied[np.lexsort((r[tied], U[tied], m[tied]))[0]]
    return RhoSearchResult(float(best), float(U[i]), int(m[i]), float(r[i]), grid.describe())


def rho_sweep(c_values, s0_fracs, grid: Grid = DEFAULT_GRID) -> list[dict]:
    """One rho* row per (S0/U, c); rows follow the CSV columns of :func:`rho_csv`."""
    rows = []
    for frac in s0_fracs:
        for c in c_values:
            res = rho_star(MipsInstance(c, frac, relative=True), grid)
            rows.append(
                dict(c=c, S0=frac * res.best_U, rho_star=res.rho_star, U=res.best_U, m=res.best_m, r=res.best_r)
            )
    return rows


def rho_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c", "S0", "rho_star", "U", "m", "r"])
    for row in rows:
        w.writerow([repr(float(row["c"])), repr(float(row["S0"])), repr(float(row["rho_star"])),
                    repr(float(row["U"])), int(row["m"]), repr(float(row["r"]))])
    return buf.getvalue()


def m_tradeoff(instance: MipsInstance, U: float, r: float, ms=range(1, 7)) -> list[tuple[int, float]]:
    """rho for each feasible m at fixed (U, r).

    Small m is penalised by the error term and large m by the ``m/4``
    offset that pushes both distances onto the flat part of F_r, so the
    curve normally falls to a single minimum and rises after it. A rise
    followed by another fall is logged.
    """
    S0 = float(instance.threshold(U))
    out = [(m, rho(S0, instance.c, U, m, r)) for m in ms if feasible(S0, instance.c, U, m)]
    rising = False
    for (m0, a), (m1, b) in zip(out, out[1:]):
        if b > a:
            rising = True
        elif rising and b < a:
            log.info("rho not unimodal in m: m=%d (%.4f) -> m=%d (%.4f) at U=%s r=%s c=%s",
                     m0, a, m1, b, U, r, instance.c)
    return out


def boundary_pair(S0: float, U: float, dim: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Unit ``q`` and ``x`` with ``q.x = S0`` and ``||x|| = U`` (the p1 equality case)."""
    if not 0 < S0 <= U or dim < 2:
        raise ValueError("need 0 < S0 <= U and dim >= 2")
    q = np.zeros(dim)
    q[0] = 1.0
    x = np.zeros(dim)
    x[0] = S0
    x[1] = np.sqrt(U * U - S0 * S0)
    return q, x


def pipeline_collision_rate(q, x, params: TransformParams, r: float, trials: int, seed) -> tuple[float, float]:
    """Empirical ``Pr[h(Q(q)) == h(P(x))]`` over ``trials`` sampled hash functions."""
    return empirical_collision_rate(transform_q(normalize_query(q), params), transform_p(x, params), r, trials, seed)
