"""Gradient descent, nu-method and Nesterov in coefficient space.

All iterations solve the normalized least-squares problem ``M u ~ y`` with
``M = K/n`` starting from ``u_0 = 0``, so that ``u_t = g_t(M) y``.  The
estimator evaluated at a point ``z`` is ``(1/n) sum_j K(z, x_j) u_t[j]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, StepSizeError
from .filters import (
    MAX_ITERATIONS,
    FilterMethod,
    GradientDescent,
    Nesterov,
    NuMethod,
    nesterov_beta,
    nu_params,
)
from .spectral import EigenDecomposition, apply_filter


@dataclass
class IterateHistory:
    """Iterates of one run.

    ``u`` holds every iterate ``u_0..u_T`` as rows when the history was kept,
    otherwise only ``(u_{T-1}, u_T)``.
    """

    method: Optional[FilterMethod]
    M: np.ndarray
    u: np.ndarray
    T: int
    full: bool = True

    @property
    def final(self) -> np.ndarray:
        return self.u[-1]

    def at(self, t: int) -> np.ndarray:
        if self.full:
            return self.u[t]
        if t == self.T:
            return self.u[-1]
        if t == self.T - 1:
            return self.u[0]
        raise IndexError(f"iterate {t} was not retained")


def _prepare(M, y, T):
    M = np.asarray(M, dtype=float)
    y = np.asarray(y, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != y.shape[0]:
        raise DomainError(f"shape mismatch: M {M.shape}, y {y.shape}")
    if T < 0 or T > MAX_ITERATIONS:
        raise DomainError(f"T={T} outside [0, {MAX_ITERATIONS}]")
    return M, y


class _Recorder:
    def __init__(self, n, T, keep, scale, ynorm):
        self.keep = keep
        self.T = T
        self.buf = np.zeros((T + 1, n)) if keep else np.zeros((2, n))
        self.scale = scale
        self.ynorm = ynorm

    def push(self, t, u):
        # a valid run obeys |u_t| <= 2 * scale * t^2 * |y|
        limit = 1e6 * max(self.ynorm, 1e-300) * max(1.0, 2.0 * self.scale * t * t)
        norm = np.linalg.norm(u)
        if not np.isfinite(norm) or norm > limit:
            raise StepSizeError(f"iteration diverged at t={t} (|u_t|={norm:.3e}); step size too large")
        if self.keep:
            self.buf[t] = u
        else:
            self.buf[0] = self.buf[1]
            self.buf[1] = u


def run_momentum(M, y, T: int, schedule: Callable[[int], tuple[float, float]], *, scale: float = 1.0,
                 keep_history: bool = True, method: Optional[FilterMethod] = None) -> IterateHistory:
    """Heavy-ball iteration ``u_{t+1} = u_t + a(y - M u_t) + b(u_t - u_{t-1})``.

    ``schedule(t)`` returns ``(a, b)`` used to produce ``u_t`` from the two
    previous iterates.
    """
    M, y = _prepare(M, y, T)
    rec = _Recorder(y.size, T, keep_history, scale, np.linalg.norm(y))
    u_prev = np.zeros_like(y)
    u = np.zeros_like(y)
    for t in range(T):
        a, b = schedule(t + 1)
        u_next = u + a * (y - M @ u) + b * (u - u_prev)
        u_prev, u = u, u_next
        rec.push(t + 1, u)
    return IterateHistory(method=method, M=M, u=rec.buf, T=T, full=keep_history)


def run_gd(M, y, alpha: float, T: int, *, kappa2: Optional[float] = None, keep_history: bool = True) -> IterateHistory:
    """Gradient descent ``u_{t+1} = u_t + alpha (y - M u_t)``."""
    method = GradientDescent(alpha=alpha, kappa2=kappa2 if kappa2 is not None else 1.0 / alpha)
    return run_momentum(M, y, T, lambda t: (alpha, 0.0), scale=alpha, keep_history=keep_history, method=method)


def run_heavy_ball(M, y, nu: float, kappa2: float, T: int, *, keep_history: bool = True,
                   schedule: Optional[Callable[[int], tuple[float, float]]] = None) -> IterateHistory:
    """nu-method: heavy-ball with the parameters of :func:`~accelreg.filters.nu_params`.

    A custom ``schedule`` replaces the nu-method parameters (used to check the
    reduction to gradient descent when the momentum vanishes).
    """
    method = NuMethod(nu=nu, kappa2=kappa2)
    if schedule is None:
        def schedule(t):
            return nu_params(t, nu, kappa2)
    return run_momentum(M, y, T, schedule, scale=1.0 / kappa2, keep_history=keep_history, method=method)


def run_nesterov(M, y, alpha: float, beta: float, T: int, *, kappa2: Optional[float] = None,
                 keep_history: bool = True, momentum: Optional[Callable[[int], float]] = None) -> IterateHistory:
    """Nesterov: ``v_t = u_t + b_t (u_t - u_{t-1})``, ``u_{t+1} = v_t + alpha (y - M v_t)``.

    ``b_t = (t-1)/(t+beta)``, or ``momentum(t)`` when given.
    """
    M, y = _prepare(M, y, T)
    if kappa2 is None:
        method = Nesterov(alpha=alpha, beta=beta, kappa2=1.0, validate=False)
    else:
        method = Nesterov(alpha=alpha, beta=beta, kappa2=kappa2)
    if beta < 1:
        raise DomainError(f"beta must be >= 1, got {beta}")
    rec = _Recorder(y.size, T, keep_history, alpha, np.linalg.norm(y))
    u_prev = np.zeros_like(y)
    u = np.zeros_like(y)
    for t in range(T):
        if momentum is not None:
            b = momentum(t)
        else:
            b = nesterov_beta(t, beta) if t >= 1 else 0.0
        v = u + b * (u - u_prev)
        u_prev, u = u, v + alpha * (y - M @ v)
        rec.push(t + 1, u)
    return IterateHistory(method=method, M=M, u=rec.buf, T=T, full=keep_history)


def run(method: FilterMethod, M, y, T: int, *, keep_history: bool = True) -> IterateHistory:
    """Dispatch on the method type."""
    if isinstance(method, GradientDescent):
        return run_gd(M, y, method.alpha, T, kappa2=method.kappa2, keep_history=keep_history)
    if isinstance(method, NuMethod):
        return run_heavy_ball(M, y, method.nu, method.kappa2, T, keep_history=keep_history)
    if isinstance(method, Nesterov):
        return run_nesterov(M, y, method.alpha, method.beta, T, kappa2=method.kappa2, keep_history=keep_history)
    raise DomainError(f"unsupported method {method!r}")


def spectral_solution(method: FilterMethod, t: int, eig: EigenDecomposition, y) -> np.ndarray:
    """Closed form ``g_t(M) y`` from an eigendecomposition of ``M``."""
    return apply_filter(method, t, eig, y)


def predict(cross_kernel, u, n: int) -> np.ndarray:
    """``(1/n) K_cross u``; ``u`` may hold several coefficient vectors as columns."""
    C = np.asarray(cross_kernel, dtype=float)
    u = np.asarray(u, dtype=float)
    if C.ndim != 2 or C.shape[1] != u.shape[0]:
        raise DomainError(f"cross kernel has {C.shape[-1]} columns but u has length {u.shape[0]}")
    return C @ u / n
