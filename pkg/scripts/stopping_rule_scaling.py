"""Empirical optimal stopping time against sample size, with fitted log-log exponents.

    python3 scripts/stopping_rule_scaling.py --ns 50,100,200,400,800 --repetitions 50

GD should scale roughly like n^(1/2) and the accelerated methods like n^(1/4)
at gamma = 1, r = 1/2.  Writes ``stopping_scaling.csv``.
"""

import argparse
from pathlib import Path

from accelreg.cli import write_csv
from accelreg.experiments import SimulationConfig, stopping_rule, stopping_scaling


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", default="50,100,200,400,800")
    ap.add_argument("--N", type=int, default=2000)
    ap.add_argument("--repetitions", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("."))
    args = ap.parse_args()

    ns = [int(v) for v in args.ns.split(",")]
    config = SimulationConfig(N=args.N, n=max(ns), T=0, repetitions=args.repetitions,
                              master_seed=args.seed, workers=args.workers)
    res = stopping_scaling(config, ns)
    args.out.mkdir(parents=True, exist_ok=True)
    rows = [(m, n, t, stopping_rule(n, kind=m)) for m, ts in res.argmins.items() for n, t in zip(ns, ts)]
    write_csv(args.out / "stopping_scaling.csv", ["method", "n", "argmin_t", "rule_t"], rows)
    for m, ts in res.argmins.items():
        print(f"{m:9s} exponent {res.exponents[m]:.3f}  argmin t {ts}")


if __name__ == "__main__":
    main()
