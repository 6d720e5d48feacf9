"""How the ALSH bucket width r affects retrieval (m=3, U=0.83 fixed)."""

import argparse

from alsh.data import gen_synthetic
from alsh.evaluation import ALSH, averaged_pr, summary_csv
from alsh.transforms import TransformParams


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10000)
    ap.add_argument("--d", type=int, default=50)
    ap.add_argument("--queries-n", type=int, default=200)
    ap.add_argument("--T", type=int, default=10)
    ap.add_argument("--K", type=int, default=128)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ds = gen_synthetic(args.n, args.d, seed=args.seed)
    Q = gen_synthetic(args.queries_n, args.d, seed=args.seed + 1).vectors
    curves = [averaged_pr(ds, Q, args.T, ALSH, args.K, r, TransformParams())
              for r in (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0)]
    print(summary_csv(curves), end="")


if __name__ == "__main__":
    main()
