#!/usr/bin/env python3
"""Grid-refinement study: analytic similarity of xor to ever-finer grid
tasks against the histogram-learner ETS estimate of the same quantity.

The analytic column follows the odd-n closed form ((n-1)^2 + (2n-1)/2)/n^2
and climbs to 1; the empirical column tracks it to sampling noise.

Usage: python scripts/convergence_study.py [--grids 1 3 5 7 9 11 15 21]
"""

import argparse

from tasksim.cli import main as cli


def run(argv=None):
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default="results/convergence")
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--target", default="xor")
    parser.add_argument("--grids", type=int, nargs="+", default=[1, 3, 5, 7, 9, 11, 15, 21])
    parser.add_argument("--n-train", type=int, default=20000)
    parser.add_argument("--replications", type=int, default=30)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    return cli([
        "convergence",
        "--target", args.target,
        "--grids", *map(str, args.grids),
        "--seed", str(args.seed),
        "--n-train", str(args.n_train),
        "--replications", str(args.replications),
        "--workers", str(args.workers),
        "--out-dir", args.out_dir,
    ])


if __name__ == "__main__":
    raise SystemExit(run())
