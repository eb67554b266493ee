"""Command-line front end: ``python -m accelreg {verify,filters,simulate,fit}``.

Settings come from dataclass defaults, then an optional ``--config`` file of
``key=value`` lines, then command-line flags (highest precedence).

Exit codes: 0 success, 1 failed check, 2 usage error, 3 data error,
4 numeric error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import config as cfg
from .bounds import VerifyConfig, verify_suite
from .errors import DataError, DomainError, NumericError
from .experiments import SimulationConfig, run_simulation
from .filters import GradientDescent, Nesterov, NuMethod, default_grid, filter_trace
from .realdata import FitConfig, fit_curves, load_table

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class FiltersConfig:
    methods: tuple = ("gd", "nu", "nesterov")
    T: int = 10
    kappa2: float = 1.0
    points: int = 16
    lower: float = 1e-8
    sigma: tuple = ()
    gd_alpha: Optional[float] = None
    nesterov_alpha: Optional[float] = None
    beta: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        if self.T < 1 or self.points < 2 or self.kappa2 <= 0:
            raise DomainError("need T >= 1, points >= 2 and kappa2 > 0")

    def build_methods(self):
        k2 = self.kappa2
        out = []
        for name in self.methods:
            if name == "gd":
                out.append(GradientDescent(alpha=self.gd_alpha or 1.0 / k2, kappa2=k2))
            elif name == "nesterov":
                out.append(Nesterov(alpha=self.nesterov_alpha or 0.99 / k2, beta=self.beta, kappa2=k2))
            elif name == "nu":
                out.append(NuMethod(nu=self.nu, kappa2=k2))
            else:
                raise DomainError(f"unknown method {name!r}")
        return out

    def grid(self):
        if self.sigma:
            return np.array(sorted({float(s) for s in self.sigma}))
        return default_grid(self.kappa2, self.points, self.lower)


# output-only keys accepted by each subcommand in addition to its config fields
EXTRA_KEYS = {
    "verify": ("output",),
    "filters": ("output",),
    "simulate": ("output", "svg"),
    "fit": ("output",),
}
CONFIGS = {"verify": VerifyConfig, "filters": FiltersConfig, "simulate": SimulationConfig, "fit": FitConfig}


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    text = ",".join(header) + "\n" + "".join(",".join(fmt(v) if not isinstance(v, str) else v for v in row) + "\n"
                                             for row in rows)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)


def write_svg(path, curves, width=800, height=600):
    """Log-log line chart of mean error against t, one polyline per method."""
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    pad = 60
    T = max(c.mean.size for c in curves.values())
    pos = np.concatenate([c.mean[c.mean > 0] for c in curves.values()])
    lo, hi = math.log10(pos.min()), math.log10(pos.max())
    if hi - lo < 1e-12:
        hi = lo + 1.0
    xmax = max(math.log10(T), 1e-12)

    def xy(t, v):
        x = pad + (width - 2 * pad) * math.log10(t) / xmax
        y = height - pad - (height - 2 * pad) * (math.log10(v) - lo) / (hi - lo)
        return f"{x:.2f},{y:.2f}"

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
             'fill="none" stroke="black"/>',
             f'<text x="{width / 2}" y="{height - 15}" text-anchor="middle">log10 t</text>',
             f'<text x="15" y="{height / 2}" transform="rotate(-90 15 {height / 2})" '
             'text-anchor="middle">log10 mean excess risk</text>']
    for k, (name, c) in enumerate(curves.items()):
        col = colors[k % len(colors)]
        pts = " ".join(xy(t, v) for t, v in zip(c.t, c.mean) if v > 0)
        parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{pts}"/>')
        mx, my = xy(c.argmin_t, c.mean[c.argmin_t - 1]).split(",")
        parts.append(f'<circle cx="{mx}" cy="{my}" r="4" fill="black"/>')
        parts.append(f'<text x="{width - pad - 100}" y="{pad + 20 + 18 * k}" fill="{col}">{name}</text>')
    parts.append("</svg>\n")
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write("\n".join(parts))


def cmd_verify(conf: VerifyConfig, extra) -> int:
    checks = verify_suite(conf)
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    text = "\n".join(lines) + "\n"
    out = extra.get("output")
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    return EXIT_CHECK if failed else EXIT_OK


def cmd_filters(conf: FiltersConfig, extra) -> int:
    grid = conf.grid()
    rows = []
    for method in conf.build_methods():
        trace = filter_trace(method, grid, conf.T)
        for t in range(conf.T + 1):
            for s, g, r in zip(trace.sigma, trace.g[t], trace.r[t]):
                rows.append((method.name, t, s, g, r))
    write_csv(extra.get("output"), ["method", "t", "sigma", "g", "r"], rows)
    return EXIT_OK


def cmd_simulate(conf: SimulationConfig, extra) -> int:
    curves = run_simulation(conf)
    rows = []
    for name, c in curves.items():
        for t, m, v in zip(c.t, c.mean, c.var):
            rows.append((name, int(t), m, v, int(t == c.argmin_t)))
    write_csv(extra.get("output"), ["method", "t", "mean_error", "var_error", "is_min"], rows)
    if extra.get("svg"):
        write_svg(extra["svg"], curves)
    return EXIT_OK


def cmd_fit(conf: FitConfig, extra) -> int:
    if not conf.data:
        raise DomainError("fit needs data=<path>")
    table = load_table(conf.data, conf.delimiter, conf.skip_header)
    curves = fit_curves(table, conf)
    rows = [(name, t, e) for name, errs in curves.items() for t, e in enumerate(errs, 1)]
    write_csv(extra.get("output"), ["method", "t", "test_error"], rows)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "filters": cmd_filters, "simulate": cmd_simulate, "fit": cmd_fit}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="accelreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, cls in CONFIGS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value settings file")
        for f in dataclasses.fields(cls):
            p.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, default=None, metavar="VALUE")
        for key in EXTRA_KEYS[name]:
            p.add_argument(f"--{key}", dest=key, default=None, metavar="PATH")
    return parser


def resolve(args) -> tuple[object, dict]:
    """Merge config file and flags into the subcommand's config and output keys."""
    cls = CONFIGS[args.command]
    values = cfg.load(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            values[key] = value
    extra = {k: values.pop(k) for k in EXTRA_KEYS[args.command] if k in values}
    return cfg.build(cls, values), extra


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        conf, extra = resolve(args)
        return COMMANDS[args.command](conf, extra)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE
