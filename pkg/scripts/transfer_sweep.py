#!/usr/bin/env python3
"""Transfer-efficiency sweep: adapted vs from-scratch risk on a target
task across target sample sizes, for a helpful source (shared optimal
partition) and an orthogonal one.

Usage: python scripts/transfer_sweep.py [--n-target 50 100 250 500]
"""

import argparse
import os

from tasksim.cli import main as cli


def run(argv=None):
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default="results/transfer")
    parser.add_argument("--seed", type=int, default=23)
    parser.add_argument("--target", default="xor")
    parser.add_argument("--sources", nargs="+", default=["quads", "rxor(45)"])
    parser.add_argument("--n-target", type=int, nargs="+", default=[50, 100, 250, 500])
    parser.add_argument("--n-source", type=int, default=5000)
    parser.add_argument("--depth", type=int, default=2)
    parser.add_argument("--replications", type=int, default=50)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    for source in args.sources:
        out = os.path.join(args.out_dir, source.replace("(", "").replace(")", ""))
        rc = cli([
            "transfer-efficiency",
            "--source", source,
            "--target", args.target,
            "--n-target", *map(str, args.n_target),
            "--n-source", str(args.n_source),
            "--depth", str(args.depth),
            "--seed", str(args.seed),
            "--replications", str(args.replications),
            "--workers", str(args.workers),
            "--out-dir", out,
        ])
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
