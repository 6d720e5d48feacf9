"""Command-line entry point: ``alsh {gen,build,query,rho,eval,collide}``.

``ALSH_SEED`` and ``ALSH_WORKERS`` override the default seed and worker
count; everything else is set by flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import data, theory
from .evaluation import DEFAULT_R_VALUES, RECALL_LEVELS, compare_methods
from .index import IndexConfig, build_index, load_index, query_index, rank_candidates, save_index
from .l2lsh import HashSeed, collision_probability, empirical_collision_rate
from .transforms import TransformParams

log = logging.getLogger("alsh")

DEFAULT_PAIRS = tuple((d, r) for r in (1.0, 2.5) for d in (0.5, 1.0, 1.5, 2.0, 3.0))


def _env_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    return int(v) if v not in (None, "") else default


def _floats(s: str) -> list[float]:
    return [float(t) for t in s.split(",") if t.strip()]


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def collide_l2_rows(pairs, trials: int, seed: int, dim: int = 8) -> list[list]:
    """Empirical vs exact collision rate for points at each (d, r)."""
    rows = []
    rng = np.random.default_rng(seed)
    for i, (d, r) in enumerate(pairs):
        x = rng.standard_normal(dim)
        u = rng.standard_normal(dim)
        y = x + d * u / np.linalg.norm(u)
        rate, se = empirical_collision_rate(x, y, r, trials, HashSeed(seed, i))
        rows.append(["l2", d, r, trials, rate, float(collision_probability(d, r)), se])
    return rows


def collide_alsh_rows(S0: float, params: TransformParams, r: float, trials: int, seed: int) -> list[list]:
    """Pipeline collision rate at the p1 equality case ``q.x = S0``, ``||x|| = U``."""
    q, x = theory.boundary_pair(S0, params.U)
    rate, se = theory.pipeline_collision_rate(q, x, params, r, trials, HashSeed(seed, 0))
    p1 = float(theory.p1_bound(S0, params.U, params.m, r))
    d = float(np.sqrt(1 + params.m / 4 - 2 * S0 + params.error_bound))
    return [["alsh", d, r, trials, rate, p1, se]]


def collide_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "d", "r", "trials", "empirical", "theoretical", "stderr"])
    for mode, d, r, n, rate, th, se in rows:
        w.writerow([mode, repr(float(d)), repr(float(r)), int(n), repr(float(rate)), repr(float(th)), repr(float(se))])
    return buf.getvalue()


def _load_queries(args, dim: int) -> np.ndarray:
    if args.vector:
        Q = np.atleast_2d(np.asarray(_floats(args.vector)))
    else:
        Q = data.read_array(args.queries)
    if Q.shape[1] != dim:
        raise ValueError(f"query dimension {Q.shape[1]} does not match data dimension {dim}")
    return Q


def cmd_gen(args) -> None:
    ds = data.gen_synthetic(args.n, args.d, args.norm_low, args.norm_high, args.seed)
    data.write_vectors(args.out, ds.vectors)
    log.info("wrote %d x %d vectors to %s", len(ds), ds.dim, args.out)


def cmd_build(args) -> None:
    ds = data.read_vectors(args.data)
    transform = None if args.symmetric else TransformParams(args.m, args.U)
    cfg = IndexConfig(args.K, args.L, args.r, transform, HashSeed(args.seed))
    idx = build_index(ds, cfg, workers=args.workers)
    save_index(idx, args.out)
    log.info("indexed %d items into %d tables (K=%d) -> %s", len(ds), args.L, args.K, args.out)


def cmd_query(args) -> None:
    ds = data.read_vectors(args.data)
    idx = load_index(args.index, ds)
    Q = _load_queries(args, ds.dim)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["query", "rank", "id", "score", "candidates"])
    for qi, q in enumerate(Q):
        cands = query_index(idx, q)
        top = rank_candidates(idx, q, cands, args.T)
        for rank, (item, score) in enumerate(top.entries, 1):
            w.writerow([qi, rank, item, repr(score), len(cands)])
    _emit(buf.getvalue(), args.out)


def cmd_rho(args) -> None:
    grid = theory.Grid(
        U=tuple(_floats(args.grid_u)) if args.grid_u else theory.DEFAULT_GRID.U,
        m=tuple(int(v) for v in _floats(args.grid_m)) if args.grid_m else theory.DEFAULT_GRID.m,
        r=tuple(_floats(args.grid_r)) if args.grid_r else theory.DEFAULT_GRID.r,
    )
    rows = theory.rho_sweep(_floats(args.c), _floats(args.s0_frac), grid)
    _emit(theory.rho_csv(rows), args.out)


def cmd_eval(args) -> None:
    if args.data:
        ds = data.read_vectors(args.data)
    else:
        ds = data.gen_synthetic(args.n, args.d, args.norm_low, args.norm_high, args.seed)
    if args.queries:
        Q = data.read_array(args.queries)
    else:
        Q = data.gen_synthetic(args.n_queries, ds.dim, args.norm_low, args.norm_high, args.seed + 1).vectors
    report = compare_methods(
        ds, Q, args.T, args.K, (TransformParams(args.m, args.U), args.alsh_r),
        _floats(args.r_values), HashSeed(args.seed), args.workers,
    )
    _emit(report.pr_csv(args.every), args.out)
    if args.summary:
        Path(args.summary).write_text(report.summary_csv(_floats(args.recall_levels)))


def cmd_collide(args) -> None:
    if args.mode == "l2":
        if args.pairs:
            vals = _floats(args.pairs)
            if len(vals) % 2:
                raise ValueError("--pairs takes d,r,d,r,...")
            pairs = list(zip(vals[0::2], vals[1::2]))
        else:
            pairs = DEFAULT_PAIRS
        rows = collide_l2_rows(pairs, args.trials, args.seed, args.dim)
    else:
        rows = collide_alsh_rows(args.s0, TransformParams(args.m, args.U), args.r, args.trials, args.seed)
    _emit(collide_csv(rows), args.out)


def build_parser() -> argparse.ArgumentParser:
    seed = _env_int("ALSH_SEED", 0)
    workers = _env_int("ALSH_WORKERS", 1)
    p = argparse.ArgumentParser(prog="alsh", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_workers=False):
        sp.add_argument("--seed", type=int, default=seed)
        if with_workers:
            sp.add_argument("--workers", type=int, default=workers)

    def transform_flags(sp):
        sp.add_argument("--m", type=int, default=3)
        sp.add_argument("--U", type=float, default=0.83)

    sp = sub.add_parser("gen", help="write a synthetic dataset")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--norm-low", type=float, default=0.2)
    sp.add_argument("--norm-high", type=float, default=1.0)
    sp.add_argument("--out", required=True)
    common(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("build", help="build an index snapshot")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--r", type=float, default=2.5)
    sp.add_argument("--symmetric", action="store_true", help="plain L2LSH, no transformations")
    transform_flags(sp)
    common(sp, with_workers=True)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("query", help="top-T from an index snapshot")
    sp.add_argument("--index", required=True)
    sp.add_argument("--data", required=True, help="the vectors the index was built from")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--queries", help="vector file or CSV of queries")
    g.add_argument("--vector", help="one comma-separated query vector")
    sp.add_argument("--T", type=int, default=10)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("rho", help="grid search for rho*")
    sp.add_argument("--s0-frac", default="0.9", help="S0/U fractions, comma-separated")
    sp.add_argument("--c", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    sp.add_argument("--grid-u")
    sp.add_argument("--grid-m")
    sp.add_argument("--grid-r")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_rho)

    sp = sub.add_parser("eval", help="ALSH vs L2LSH precision/recall")
    sp.add_argument("--data")
    sp.add_argument("--queries")
    sp.add_argument("--n", type=int, default=10000)
    sp.add_argument("--d", type=int, default=50)
    sp.add_argument("--n-queries", type=int, default=200)
    sp.add_argument("--norm-low", type=float, default=0.2)
    sp.add_argument("--norm-high", type=float, default=1.0)
    sp.add_argument("--K", type=int, default=64)
    sp.add_argument("--T", type=int, default=10)
    sp.add_argument("--alsh-r", type=float, default=2.5)
    sp.add_argument("--r-values", default=",".join(str(v) for v in DEFAULT_R_VALUES))
    sp.add_argument("--recall-levels", default=",".join(str(v) for v in RECALL_LEVELS))
    sp.add_argument("--every", type=int, default=1, help="emit every n-th rank")
    sp.add_argument("--summary", help="also write the interpolated-precision summary CSV")
    sp.add_argument("--out")
    transform_flags(sp)
    common(sp, with_workers=True)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("collide", help="Monte-Carlo collision-probability check")
    sp.add_argument("--mode", choices=("l2", "alsh"), default="l2")
    sp.add_argument("--pairs", help="d,r,d,r,... (l2 mode)")
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--s0", type=float, default=0.415)
    sp.add_argument("--r", type=float, default=2.5)
    sp.add_argument("--trials", type=int, default=100000)
    sp.add_argument("--out")
    transform_flags(sp)
    common(sp)
    sp.set_defaults(func=cmd_collide)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"alsh {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
