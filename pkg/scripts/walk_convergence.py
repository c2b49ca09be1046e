"""KS distance of random-walk (1,1)-entries from the |X_d| law as the walk grows.

Emits CSV: length, D_n, critical value at alpha=0.01.
"""
import argparse

import numpy as np

from wrtrand.rmt import WalkConfig, run_entry_walk
from wrtrand.stats import AnalyticLaw, EmpiricalDistribution, ks_test


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=5)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--lengths", type=int, nargs="+", default=[1, 2, 5, 10, 25, 50, 125, 250, 625])
    ap.add_argument("--generators", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    law = AnalyticLaw.entry(args.dim)
    print("length,ks_statistic,critical_0.01")
    for length in args.lengths:
        cfg = WalkConfig(dim=args.dim, num_generators=args.generators, walk_length=length,
                         num_samples=args.samples, seed=args.seed)
        x = np.abs(run_entry_walk(cfg, threads=args.threads).values)
        rep = ks_test(EmpiricalDistribution(x), law)
        print(f"{length},{rep.statistic:.6f},{rep.critical_value:.6f}")


if __name__ == "__main__":
    main()
