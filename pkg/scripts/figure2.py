"""Test error against iteration on a regression table with Gaussian and polynomial kernels.

The last column of the table is the target.  For the pumadyn8nh setting:

    python3 scripts/figure2.py path/to/pumadyn8nh.data --out results/

Writes ``figure2_<kernel>.csv`` and ``.svg`` for each kernel.
"""

import argparse
from pathlib import Path

import numpy as np

from accelreg.cli import write_csv, write_svg
from accelreg.experiments import ErrorCurve
from accelreg.realdata import FitConfig, fit_curves, load_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("data", type=Path)
    ap.add_argument("--train", type=int, default=1000)
    ap.add_argument("--T", type=int, default=1000)
    ap.add_argument("--width", type=float, default=1.2)
    ap.add_argument("--degree", type=int, default=9)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-header", action="store_true")
    ap.add_argument("--out", type=Path, default=Path("."))
    args = ap.parse_args()

    table = load_table(args.data, skip_header=args.skip_header)
    args.out.mkdir(parents=True, exist_ok=True)
    for kernel in ("gaussian", "polynomial"):
        conf = FitConfig(data=str(args.data), kernel=kernel, width=args.width, degree=args.degree,
                         train=args.train, seed=args.seed, T=args.T)
        curves = fit_curves(table, conf)
        rows = [(m, t, e) for m, errs in curves.items() for t, e in enumerate(errs, 1)]
        write_csv(args.out / f"figure2_{kernel}.csv", ["method", "t", "test_error"], rows)
        write_svg(args.out / f"figure2_{kernel}.svg",
                  {m: ErrorCurve(m, e, np.zeros_like(e), 1) for m, e in curves.items()})
        for m, e in curves.items():
            k = int(np.argmin(e))
            print(f"{kernel:10s} {m:9s} argmin t = {k + 1:5d}  min test error = {e[k]:.4g}")


if __name__ == "__main__":
    main()
