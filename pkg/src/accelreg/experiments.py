"""Repetition harness for the synthetic early-stopping experiments."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError
from .filters import default_method, fit_loglog_slope
from .solvers import run
from .synthetic import RiskEvaluator, draw_sample, generate_problem

ACCELERATED = ("nu", "nesterov")


@dataclass(frozen=True)
class SimulationConfig:
    """Settings of one simulation.

    ``kappa2`` selects the step-size bound: ``"problem"`` uses
    ``max_z K(z, z)`` of the generated problem, ``"sample"`` the largest
    eigenvalue of each sampled ``M``.  ``T = 0`` means
    ``20 * stopping_rule`` for gradient descent.
    """

    N: int = 2000
    n: int = 100
    gamma: float = 1.0
    r: float = 0.5
    noise: float = 0.5
    T: int = 400
    repetitions: int = 50
    methods: tuple = ("gd", "nu", "nesterov")
    master_seed: int = 0
    source_norm: float = 1.0
    source_decay: float = 1.0
    mixer: str = "dct"
    kappa2: str = "problem"
    nu: float = 1.0
    beta: float = 1.0
    replace: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise DomainError("repetitions must be >= 1")
        if not 1 <= self.n <= self.N:
            raise DomainError(f"need 1 <= n <= N, got n={self.n}, N={self.N}")
        if self.T < 0:
            raise DomainError("T must be >= 0")
        if self.kappa2 not in ("problem", "sample"):
            raise DomainError(f"kappa2 must be 'problem' or 'sample', got {self.kappa2!r}")
        for m in self.methods:
            if m not in ("gd", "nu", "nesterov"):
                raise DomainError(f"unknown method {m!r}")

    @property
    def horizon(self) -> int:
        if self.T > 0:
            return self.T
        return 20 * stopping_rule(self.n, self.gamma, self.r, "gd", attainable=self.r >= 0.5)


@dataclass
class ErrorCurve:
    """Mean and variance of the excess risk over repetitions for ``t = 1..T``."""

    method: str
    mean: np.ndarray
    var: np.ndarray
    repetitions: int

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.mean.size + 1)

    @property
    def argmin_t(self) -> int:
        # np.argmin returns the first occurrence
        return int(np.argmin(self.mean)) + 1

    @property
    def min_error(self) -> float:
        return float(self.mean.min())

    def stderr(self) -> np.ndarray:
        return np.sqrt(self.var / self.repetitions)


def _repetition(args):
    config, problem, k = args
    T = config.horizon
    sample = draw_sample(problem, config.n, config.master_seed + k, replace=config.replace)
    if config.kappa2 == "problem":
        k2 = problem.kappa2
    else:
        k2 = float(np.linalg.eigvalsh(sample.M)[-1])
    risk = RiskEvaluator(problem, sample)
    out = {}
    for name in config.methods:
        method = default_method(name, k2, nu=config.nu, beta=config.beta)
        try:
            hist = run(method, sample.M, sample.y_hat, T)
        except NumericError as exc:
            raise type(exc)(f"repetition {k}: {exc}") from exc
        out[name] = risk(hist.u[1:])
    return out


def make_problem(config: SimulationConfig):
    return generate_problem(
        config.N, config.gamma, config.r, config.noise, config.master_seed,
        source_norm=config.source_norm, source_decay=config.source_decay, mixer=config.mixer,
    )


def run_simulation(config: SimulationConfig, problem=None) -> dict[str, ErrorCurve]:
    """Error curves of every configured method.

    The problem is generated from ``master_seed`` and repetition ``k`` draws
    its sample with seed ``master_seed + k``.  Results are reduced in
    repetition order, so ``workers > 1`` gives identical output.
    """
    if problem is None:
        problem = make_problem(config)
    if config.kappa2 == "problem":
        problem.kappa2  # computed once, before any fork
    jobs = [(config, problem, k) for k in range(config.repetitions)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_repetition, jobs))
    else:
        results = [_repetition(j) for j in jobs]
    curves = {}
    for name in config.methods:
        errs = np.stack([res[name] for res in results])
        var = errs.var(axis=0, ddof=1) if errs.shape[0] > 1 else np.zeros(errs.shape[1])
        curves[name] = ErrorCurve(name, errs.mean(axis=0), var, errs.shape[0])
    return curves


def stopping_rule(n: int, gamma: float = 1.0, r: float = 0.5, kind: str = "gd", *,
                  attainable: bool = True, multiplier: float = 1.0) -> int:
    """Iteration count of the theoretical stopping rule with unit constant.

    Gradient descent stops at ``n^(1/2)`` (attainable) or
    ``n^(gamma/(2 gamma r + 1))``; accelerated methods at the square root of
    those.  ``kind`` is ``"gd"`` or one of the accelerated method names.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if attainable:
        exponent = 0.5
    else:
        exponent = gamma / (2 * gamma * r + 1)
    if kind in ACCELERATED or kind == "accelerated":
        exponent /= 2
    elif kind != "gd":
        raise DomainError(f"unknown method kind {kind!r}")
    return max(1, math.floor(multiplier * n**exponent + 0.5))


def fit_exponent(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x`` (at least three points)."""
    if len(x) != len(y) or len(x) < 3:
        raise DomainError("fit_exponent needs at least three (x, y) pairs")
    return fit_loglog_slope(x, y)


@dataclass
class ScalingResult:
    ns: list
    argmins: dict = field(default_factory=dict)
    exponents: dict = field(default_factory=dict)


def stopping_scaling(config: SimulationConfig, ns, problem=None) -> ScalingResult:
    """Empirical ``argmin_t`` per method across sample sizes and its log-log slope."""
    from dataclasses import replace

    if problem is None:
        problem = make_problem(config)
    out = ScalingResult(ns=list(ns), argmins={m: [] for m in config.methods})
    for n in ns:
        curves = run_simulation(replace(config, n=n), problem)
        for m, c in curves.items():
            out.argmins[m].append(c.argmin_t)
    for m, a in out.argmins.items():
        out.exponents[m] = fit_exponent(ns, a)
    return out
