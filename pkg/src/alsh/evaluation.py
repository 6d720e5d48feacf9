"""Collision-count ranking and precision/recall evaluation.

Every item gets ``Matches_j``, the number of the ``K`` shared hash
functions on which it agrees with the query. Items are ranked by that
count (ties to the smaller id) and the ranking is scored against the exact
top-T by inner product, walking down the list one rank at a time.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, TopTResult, as_vector, brute_force_top_t
from .l2lsh import HashSeed, sample_bank
from .transforms import TransformParams, normalize_query, scale_dataset, transform_p, transform_q

ALSH = "alsh"
L2LSH = "l2lsh"
DEFAULT_R_VALUES = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0)
RECALL_LEVELS = (0.2, 0.5, 0.8)


@dataclass(frozen=True, eq=False)
class MatchCounts:
    ids: np.ndarray
    counts: np.ndarray
    K: int


class CollisionRanker:
    """Hashes a dataset once with ``K`` shared functions for one method."""

    def __init__(self, ds: Dataset, method: str, K: int, r: float = 2.5,
                 transform: TransformParams | None = None, seed: HashSeed = HashSeed()):
        if K < 1:
            raise ValueError("K must be >= 1")
        if method not in (ALSH, L2LSH):
            raise ValueError(f"unknown method {method!r}")
        self.ds = ds
        self.method = method
        self.K = K
        self.r = float(r)
        if method == ALSH:
            self.transform = transform or TransformParams()
            items = transform_p(scale_dataset(ds, self.transform).base.vectors, self.transform)
        else:
            self.transform = None
            items = ds.vectors
        self.bank = sample_bank(items.shape[1], r, seed, K)
        self.item_codes = self.bank.hash(items)

    def query_codes(self, q) -> np.ndarray:
        q = as_vector(q, "query")
        if q.shape[0] != self.ds.dim:
            raise ValueError("query dimension does not match the dataset")
        if self.method == ALSH:
            q = transform_q(normalize_query(q), self.transform)
        return self.bank.hash(q)

    def match_counts(self, q) -> MatchCounts:
        counts = np.count_nonzero(self.item_codes == self.query_codes(q), axis=1)
        return MatchCounts(self.ds.ids, counts, self.K)

    def rank(self, q) -> np.ndarray:
        mc = self.match_counts(q)
        return mc.ids[np.lexsort((mc.ids, -mc.counts))]


def collision_count_rank(q, ds: Dataset, method: str, K: int, r: float = 2.5,
                         transform: TransformParams | None = None,
                         seed: HashSeed = HashSeed()) -> np.ndarray:
    """All item ids sorted by match count descending, ties by smaller id."""
    return CollisionRanker(ds, method, K, r, transform, seed).rank(q)


@dataclass(frozen=True, eq=False)
class PRCurve:
    """Precision and recall after each rank ``k = 1..N``."""

    k: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    T: int
    method: str = ""
    r: float = math.nan
    K: int = 0

    def precision_at_recall(self, levels=RECALL_LEVELS) -> np.ndarray:
        return np.array([interpolate_precision(self, lv) for lv in levels])


def pr_curve(ranked, gold: TopTResult, method: str = "", r: float = math.nan, K: int = 0) -> PRCurve:
    """Walk ``ranked`` top-down; recall is relative to the ``len(gold)`` gold items."""
    ranked = np.asarray(ranked, dtype=np.int64)
    if len(gold) == 0:
        raise ValueError("gold standard is empty")
    if not np.isin(gold.ids, ranked).all():
        raise ValueError("gold ids missing from the ranked list")
    seen = np.cumsum(np.isin(ranked, gold.ids))
    k = np.arange(1, len(ranked) + 1)
    return PRCurve(k, seen / k, seen / len(gold), gold.T, method, r, K)


def interpolate_precision(curve: PRCurve, level: float) -> float:
    """Precision at ``level`` recall, linear between adjacent curve points."""
    rec, prec = curve.recall, curve.precision
    i = int(np.searchsorted(rec, level, side="left"))
    if i >= len(rec):
        return math.nan
    if i == 0 or rec[i] == level:
        return float(prec[i])
    t = (level - rec[i - 1]) / (rec[i] - rec[i - 1])
    return float(prec[i - 1] + t * (prec[i] - prec[i - 1]))


def averaged_pr(ds: Dataset, queries, T: int, method: str, K: int, r: float = 2.5,
                transform: TransformParams | None = None, seed: HashSeed = HashSeed(),
                workers: int = 1) -> PRCurve:
    """Mean per-rank precision and recall over ``queries``.

    The reduction runs in query order, so the result is identical for any
    worker count.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if len(queries) == 0:
        raise ValueError("need at least one query")
    ranker = CollisionRanker(ds, method, K, r, transform, seed)

    def one(q):
        c = pr_curve(ranker.rank(q), brute_force_top_t(q, ds, T))
        return c.precision, c.recall

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, queries))
    else:
        parts = [one(q) for q in queries]
    p_sum = np.zeros(len(ds))
    r_sum = np.zeros(len(ds))
    for p, rc in parts:
        p_sum += p
        r_sum += rc
    n = len(queries)
    return PRCurve(np.arange(1, len(ds) + 1), p_sum / n, r_sum / n, T, method, float(r), K)


@dataclass
class ComparisonReport:
    curves: list[PRCurve] = field(default_factory=list)

    def alsh(self) -> PRCurve:
        return next(c for c in self.curves if c.method == ALSH)

    def baselines(self) -> list[PRCurve]:
        return [c for c in self.curves if c.method == L2LSH]

    def pr_csv(self, every: int = 1) -> str:
        return pr_csv(self.curves, every)

    def summary_csv(self, levels=RECALL_LEVELS) -> str:
        return summary_csv(self.curves, levels)


def compare_methods(ds: Dataset, queries, T: int, K: int,
                    alsh_params: tuple[TransformParams, float] | None = None,
                    l2lsh_r_values=DEFAULT_R_VALUES, seed: HashSeed = HashSeed(),
                    workers: int = 1) -> ComparisonReport:
    """One ALSH curve plus one L2LSH curve per bucket width."""
    transform, r = alsh_params or (TransformParams(), 2.5)
    report = ComparisonReport()
    report.curves.append(averaged_pr(ds, queries, T, ALSH, K, r, transform, seed, workers))
    for rr in l2lsh_r_values:
        report.curves.append(averaged_pr(ds, queries, T, L2LSH, K, rr, None, seed, workers))
    return report


def _fmt(x) -> str:
    return repr(float(x))


def pr_csv(curves, every: int = 1) -> str:
    """Columns: method, r, K, T, k, precision, recall. ``every`` thins ranks (last rank kept)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "r", "K", "T", "k", "precision", "recall"])
    for c in curves:
        rows = np.arange(0, len(c.k), every)
        if rows[-1] != len(c.k) - 1:
            rows = np.append(rows, len(c.k) - 1)
        for i in rows:
            w.writerow([c.method, _fmt(c.r), c.K, c.T, int(c.k[i]), _fmt(c.precision[i]), _fmt(c.recall[i])])
    return buf.getvalue()


def summary_csv(curves, levels=RECALL_LEVELS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "r", "K", "T", "recall_level", "interpolated_precision"])
    for c in curves:
        for lv in levels:
            w.writerow([c.method, _fmt(c.r), c.K, c.T, _fmt(lv), _fmt(interpolate_precision(c, lv))])
    return buf.getvalue()
