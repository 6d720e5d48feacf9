"""Optimal rho* and the recommended-parameter rho across approximation ratios.

Writes one CSV row per (S0/U, c) with the grid optimum and the rho of
m=3, U=0.83, r=2.5 alongside it.

    python scripts/rho_curves.py --out rho_curves.csv
"""

import argparse
import csv
import sys

import numpy as np

from alsh.theory import InfeasibleError, MipsInstance, feasible, recommended_params, rho, rho_star


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fracs", default="0.9,0.8,0.7,0.6,0.5")
    ap.add_argument("--c-step", type=float, default=0.05)
    ap.add_argument("--out")
    args = ap.parse_args()

    t, r = recommended_params()
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["s0_frac", "c", "rho_star", "U", "m", "r", "rho_recommended"])
    for frac in (float(f) for f in args.fracs.split(",")):
        for c in np.round(np.arange(args.c_step, 1.0, args.c_step), 10):
            try:
                res = rho_star(MipsInstance(float(c), frac, relative=True))
            except InfeasibleError:
                continue
            S0 = frac * t.U
            rec = rho(S0, c, t.U, t.m, r) if feasible(S0, c, t.U, t.m) else float("nan")
            w.writerow([frac, c, res.rho_star, res.best_U, res.best_m, res.best_r, rec])
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
