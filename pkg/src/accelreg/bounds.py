"""Numerical verification of the filter bounds on a dense spectral grid.

Each check streams over ``t = 1..T`` and records the worst margin
``lhs - rhs`` together with its location ``(t, sigma)``.  A check passes
when the margin stays within its stated tolerance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .filters import (
    FilterMethod,
    GradientDescent,
    Nesterov,
    NuMethod,
    default_grid,
    filter_trace,
    gd_maximizers,
    iter_filters,
    jacobi_orthogonality,
    nesterov_auxiliary,
    qualification_slope,
    qualification_sup,
)

GD_ORDERS = (0.5, 1.0, 2.0)


@dataclass
class BoundCheck:
    name: str
    margin: float
    t: Optional[int] = None
    sigma: Optional[float] = None
    tol: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.margin) and self.margin <= self.tol)

    def line(self) -> str:
        where = ""
        if self.t is not None:
            where = f" at t={self.t}"
            if self.sigma is not None:
                where += f", sigma={self.sigma:.6g}"
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: worst margin {self.margin:.6g}{where}"


class _Worst:
    """Running maximum of ``lhs - rhs - allowance`` over (t, sigma)."""

    def __init__(self, name, tol=0.0):
        self.check = BoundCheck(name, -math.inf, tol=tol)
        self.base_tol = tol
        self._excess = -math.inf

    def update(self, t, sigma, margin, allowance=0.0):
        excess = margin - allowance
        k = int(np.argmax(excess))
        if excess[k] > self._excess or not np.isfinite(excess[k]):
            self._excess = excess[k]
            self.check.margin = float(margin[k]) if np.isfinite(excess[k]) else math.inf
            self.check.t = t
            self.check.sigma = float(sigma[k]) if np.ndim(sigma) else float(sigma)

    def result(self) -> BoundCheck:
        # fold the relative allowance at the worst point into tol
        if np.isfinite(self._excess):
            self.check.tol = self.base_tol + (self.check.margin - self._excess)
        return self.check


def _method_checks(method: FilterMethod, grid, T: int, *, qual: bool = True) -> list[BoundCheck]:
    label = method.name
    identity = _Worst(f"{label}: |1 - sigma g_t - r_t| <= 1e-9", tol=1e-9)
    f0 = _Worst(f"{label}: |r_t| <= 1", tol=1e-12)
    ebound = _Worst(f"{label}: |g_t| <= {_e_text(method)}")
    quals = {}
    if qual and isinstance(method, GradientDescent):
        for q in GD_ORDERS:
            quals[q] = _Worst(f"gd: sup sigma^{q:g} |r_t| <= (q/alpha)^q t^-q")
    if qual and isinstance(method, Nesterov):
        quals[0.5] = _Worst("nesterov: sup sigma^0.5 |r_t| <= (beta^2/alpha)^0.5 / t")
    powers = {q: grid**q for q in quals}
    for t, g, r in iter_filters(method, grid, T):
        if t == 0:
            continue
        identity.update(t, grid, np.abs(1.0 - grid * g - r))
        f0.update(t, grid, np.abs(r) - 1.0)
        gb = method.g_bound(t)
        ebound.update(t, grid, np.abs(g) - gb, allowance=1e-12 * gb)
        for q, w in quals.items():
            if isinstance(method, GradientDescent):
                rhs = (q / method.alpha) ** q * t**-q
            else:
                rhs = method.beta / math.sqrt(method.alpha) / t
            w.update(t, grid, powers[q] * np.abs(r) - rhs, allowance=1e-12 * rhs)
    return [identity.result(), f0.result(), ebound.result()] + [w.result() for w in quals.values()]


def _e_text(method):
    if isinstance(method, GradientDescent):
        return "alpha t"
    if isinstance(method, Nesterov):
        return "2 alpha t^2"
    return "2 t^2 / kappa2"


def nesterov_checks(method: Nesterov, grid, T: int) -> list[BoundCheck]:
    aux = nesterov_auxiliary(grid, T, method.alpha, method.beta, method.kappa2, keep_R=False,
                             validate=method.validate)
    t_R = int(np.argmax(aux.max_abs_R))
    R_check = BoundCheck("nesterov: |R_t| <= 1", float(aux.max_abs_R[t_R] - 1.0), t=t_R, tol=1e-12)
    margins = aux.margin[1:]
    t_m = int(np.nanargmax(margins)) + 1
    sig = float(aux.sigma[aux.margin_argmax[t_m]])
    line = BoundCheck(
        "nesterov: sigma r_t^2 <= theta_{t-1}^2 (1 - alpha sigma)^(t+1) / alpha",
        float(aux.margin[t_m]), t=t_m, sigma=sig, tol=1e-12,
    )
    return [R_check, line]


def nu_slope_checks(nus=(1.0, 2.0), t_min: int = 50, t_max: int = 500, points: int = 512) -> list[BoundCheck]:
    out = []
    grid = default_grid(1.0, points)
    for nu in nus:
        trace = filter_trace(NuMethod(nu=nu, kappa2=1.0), grid, t_max)
        slope = qualification_slope(qualification_sup(trace, nu), t_min, t_max)
        limit = -2 * nu + 0.1
        out.append(BoundCheck(f"nu={nu:g}: slope of sup sigma^nu |r_t| on [{t_min}, {t_max}] <= {limit:g}",
                              slope - limit))
    return out


def jacobi_checks(nu: float = 1.0, top: int = 6, tol: float = 1e-4, quad_tol: float = 1e-10) -> list[BoundCheck]:
    # the diagonal integrals are O(1e-3), so panels need a much finer absolute tolerance than tol
    diag = {t: jacobi_orthogonality(nu, t, t, tol=quad_tol) for t in range(1, top + 1)}
    worst, pair = -math.inf, None
    for t, s in itertools.combinations(range(1, top + 1), 2):
        value = abs(jacobi_orthogonality(nu, t, s, tol=quad_tol)) / math.sqrt(diag[t] * diag[s])
        if value > worst:
            worst, pair = value, (t, s)
    return [BoundCheck(f"nu={nu:g}: normalized Jacobi inner products for t != s <= {top} "
                       f"(worst pair {pair})", worst - tol)]


@dataclass
class VerifyConfig:
    kappa2: float = 1.0
    T: int = 2000
    points: int = 512
    gd_alpha: Optional[float] = None
    nesterov_alpha: Optional[float] = None
    beta: float = 1.0
    nu: float = 1.0
    slopes: bool = True
    jacobi: bool = True


def verify_suite(config: VerifyConfig = VerifyConfig()) -> list[BoundCheck]:
    """Run every filter bound check; step sizes default to ``1/kappa2`` and ``0.99/kappa2``.

    Step sizes given explicitly are not validated, so out-of-range values can
    be used to see the checks fail.
    """
    k2 = config.kappa2
    gd_alpha = 1.0 / k2 if config.gd_alpha is None else config.gd_alpha
    nes_alpha = 0.99 / k2 if config.nesterov_alpha is None else config.nesterov_alpha
    gd = GradientDescent(alpha=gd_alpha, kappa2=k2, validate=False)
    nes = Nesterov(alpha=nes_alpha, beta=config.beta, kappa2=k2, validate=False)
    nu = NuMethod(nu=config.nu, kappa2=k2)
    extra = gd_maximizers(gd_alpha, GD_ORDERS, config.T, k2)
    grid = default_grid(k2, config.points, extra=extra)
    checks = _method_checks(gd, grid, config.T)
    checks += _method_checks(nes, grid, config.T)
    checks += nesterov_checks(nes, grid, config.T)
    checks += _method_checks(nu, grid, config.T)
    if config.slopes:
        checks += nu_slope_checks()
    if config.jacobi:
        checks += jacobi_checks(config.nu)
    return checks
