"""ALSH vs L2LSH over the T x K grid on synthetic latent factors.

Prints the interpolated-precision summary for every (T, K) cell; point
``--data``/``--queries`` at externally computed factors to use real
item and user vectors instead.

    python scripts/pr_grid.py --n 10000 --queries-n 200 > summary.csv
"""

import argparse
import sys

from alsh.data import gen_synthetic, read_array, read_vectors
from alsh.evaluation import compare_methods
from alsh.l2lsh import HashSeed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data")
    ap.add_argument("--queries")
    ap.add_argument("--n", type=int, default=10000)
    ap.add_argument("--d", type=int, default=50)
    ap.add_argument("--queries-n", type=int, default=200)
    ap.add_argument("--T", default="1,5,10")
    ap.add_argument("--K", default="64,128,256,512")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    ds = read_vectors(args.data) if args.data else gen_synthetic(args.n, args.d, seed=args.seed)
    Q = read_array(args.queries) if args.queries else gen_synthetic(args.queries_n, ds.dim, seed=args.seed + 1).vectors
    header = True
    for T in (int(v) for v in args.T.split(",")):
        for K in (int(v) for v in args.K.split(",")):
            print(f"T={T} K={K}", file=sys.stderr)
            text = compare_methods(ds, Q, T, K, seed=HashSeed(args.seed), workers=args.workers).summary_csv()
            sys.stdout.write(text if header else text.split("\n", 1)[1])
            header = False


if __name__ == "__main__":
    main()
