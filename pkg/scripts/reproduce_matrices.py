#!/usr/bin/env python3
"""Analytic and empirical pairwise similarity matrices for the four
benchmark tasks, with SVG heatmaps (exact values above, tree-estimated
values below, mirroring the standard side-by-side presentation).

Usage: python scripts/reproduce_matrices.py [--out-dir results/matrices] [--seed 7]
"""

import argparse

from tasksim.cli import main as cli


def run(argv=None):
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default="results/matrices")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--replications", type=int, default=30)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    rc = cli([
        "analytic-matrix",
        "--out-dir", args.out_dir,
        "--format", "csv,json,svg",
    ])
    if rc != 0:
        return rc
    return cli([
        "empirical-matrix",
        "--seed", str(args.seed),
        "--replications", str(args.replications),
        "--workers", str(args.workers),
        "--out-dir", args.out_dir,
        "--format", "csv,json,svg",
    ])


if __name__ == "__main__":
    raise SystemExit(run())
