"""Spectral filter polynomials of gradient descent, the nu-method and Nesterov.

Every iteration started at zero produces an estimate ``g_t(S) X^T y`` for a
polynomial ``g_t``; the residual polynomial ``r_t(s) = 1 - s g_t(s)`` controls
the bias.  This module evaluates both polynomials on scalar grids through the
exact three-term recursions of each method, and provides the scalar objects
used to check their filtering bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Iterator, Optional

import numpy as np

from .errors import DomainError, FilterOverflowError, NumericError

MAX_ITERATIONS = 10**6


@dataclass(frozen=True)
class FilterMethod:
    """Base class of the three iteration families.

    Subclasses carry their own hyperparameters and the bound ``kappa2`` on the
    spectrum the iteration is applied to.
    """

    name: ClassVar[str] = ""

    def lam(self, t: int) -> float:
        """Regularization parameter associated with iteration ``t``."""
        raise NotImplementedError

    @property
    def step_scale(self) -> float:
        """Scale of a single step (used by divergence guards)."""
        raise NotImplementedError

    def g_bound(self, t: int) -> float:
        """Uniform bound on ``|g_t|`` over the admissible spectrum."""
        raise NotImplementedError


@dataclass(frozen=True)
class GradientDescent(FilterMethod):
    alpha: float
    kappa2: float = 1.0
    validate: bool = field(default=True, repr=False, compare=False)

    name: ClassVar[str] = "gd"

    def __post_init__(self):
        if not self.validate:
            return
        if self.alpha <= 0 or self.kappa2 <= 0:
            raise DomainError("gradient descent needs alpha > 0 and kappa2 > 0")
        if self.alpha * self.kappa2 > 1.0 + 1e-12:
            raise DomainError(
                f"step size alpha={self.alpha} violates alpha*kappa2 <= 1 (kappa2={self.kappa2})"
            )

    def lam(self, t):
        return 1.0 if t == 0 else 1.0 / t

    @property
    def step_scale(self):
        return self.alpha

    def g_bound(self, t):
        return self.alpha * t


@dataclass(frozen=True)
class NuMethod(FilterMethod):
    """Heavy-ball with the varying parameters of the nu-method."""

    nu: float = 1.0
    kappa2: float = 1.0
    validate: bool = field(default=True, repr=False, compare=False)

    name: ClassVar[str] = "nu"

    def __post_init__(self):
        if not self.validate:
            return
        if self.nu <= 0 or self.kappa2 <= 0:
            raise DomainError("nu-method needs nu > 0 and kappa2 > 0")

    @property
    def bounds_apply(self) -> bool:
        """The uniform constants E=2, F0=1 are only stated for kappa <= 1."""
        return self.kappa2 <= 1.0

    def lam(self, t):
        return 1.0 if t == 0 else 1.0 / t**2

    @property
    def step_scale(self):
        return 1.0 / self.kappa2

    def g_bound(self, t):
        return 2.0 * t**2 / self.kappa2


@dataclass(frozen=True)
class Nesterov(FilterMethod):
    alpha: float
    beta: float = 1.0
    kappa2: float = 1.0
    validate: bool = field(default=True, repr=False, compare=False)

    name: ClassVar[str] = "nesterov"

    def __post_init__(self):
        if not self.validate:
            return
        if self.alpha <= 0 or self.kappa2 <= 0:
            raise DomainError("Nesterov needs alpha > 0 and kappa2 > 0")
        if self.alpha * self.kappa2 >= 1.0:
            raise DomainError(
                f"step size alpha={self.alpha} violates alpha*kappa2 < 1 (kappa2={self.kappa2})"
            )
        if self.beta < 1.0:
            raise DomainError(f"Nesterov momentum parameter beta={self.beta} must be >= 1")

    def lam(self, t):
        return 1.0 if t == 0 else 1.0 / t**2

    @property
    def step_scale(self):
        return self.alpha

    def g_bound(self, t):
        return 2.0 * self.alpha * t**2


METHODS = {cls.name: cls for cls in (GradientDescent, NuMethod, Nesterov)}


def default_method(name: str, kappa2: float = 1.0, *, nu: float = 1.0, beta: float = 1.0) -> FilterMethod:
    """Method ``name`` with the default hyperparameters for spectrum bound ``kappa2``.

    Gradient descent uses ``alpha = 1/kappa2``; Nesterov needs a strict
    inequality and uses ``alpha = 0.99/kappa2``.
    """
    if name == "gd":
        return GradientDescent(alpha=1.0 / kappa2, kappa2=kappa2)
    if name == "nesterov":
        return Nesterov(alpha=0.99 / kappa2, beta=beta, kappa2=kappa2)
    if name == "nu":
        return NuMethod(nu=nu, kappa2=kappa2)
    raise DomainError(f"unknown method {name!r}; expected one of {sorted(METHODS)}")


def nu_params(t: int, nu: float, kappa2: float = 1.0) -> tuple[float, float]:
    """Step and momentum ``(alpha_t, beta_t)`` of the nu-method at step ``t``."""
    if t < 1:
        raise DomainError(f"nu-method parameters are defined for t >= 1, got t={t}")
    if nu <= 0 or kappa2 <= 0:
        raise DomainError("nu and kappa2 must be positive")
    if t == 1:
        return (4 * nu + 2) / ((4 * nu + 1) * kappa2), 0.0
    alpha = (4.0 / kappa2) * (2 * t + 2 * nu - 1) * (t + nu - 1) / ((t + 2 * nu - 1) * (2 * t + 4 * nu - 1))
    beta = (t - 1) * (2 * t - 3) * (2 * t + 2 * nu - 1) / (
        (t + 2 * nu - 1) * (2 * t + 4 * nu - 1) * (2 * t + 2 * nu - 3)
    )
    return alpha, beta


def nesterov_beta(t: int, beta: float = 1.0) -> float:
    """Momentum coefficient ``(t-1)/(t+beta)`` of the Nesterov iteration."""
    if beta < 1.0:
        raise DomainError(f"beta must be >= 1, got {beta}")
    if t < 1:
        raise DomainError(f"momentum coefficient is defined for t >= 1, got t={t}")
    return (t - 1) / (t + beta)


def nesterov_theta(t: int, beta: float = 1.0) -> float:
    """``theta_t = beta/(t+beta)``, the convex weight behind ``nesterov_beta``."""
    return beta / (t + beta)


def _check_T(T):
    if T < 0 or T > MAX_ITERATIONS:
        raise DomainError(f"iteration count T={T} outside [0, {MAX_ITERATIONS}]")


def _raise_if_nonfinite(t, sigma, *arrays):
    # overflow is reported through FilterOverflowError, not numpy warnings
    for a in arrays:
        bad = ~np.isfinite(a)
        if bad.any():
            raise FilterOverflowError(t, float(np.asarray(sigma).ravel()[np.argmax(bad.ravel())]))


def iter_filters(method: FilterMethod, sigma, T: int) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield ``(t, g_t(sigma), r_t(sigma))`` for ``t = 0..T``.

    No domain check is made on ``sigma`` so the recursion can be used at
    clipped zero eigenvalues.  Arrays yielded are fresh and may be kept.
    """
    _check_T(T)
    steps = _iter_filters(method, np.asarray(sigma, dtype=float), T)
    while True:
        # scoped per step so the caller's error state is untouched between yields
        with np.errstate(over="ignore", invalid="ignore"):
            item = next(steps, None)
        if item is None:
            return
        yield item


def _iter_filters(method, s, T):
    g_prev = np.zeros_like(s)
    r_prev = np.ones_like(s)
    g, r = g_prev.copy(), r_prev.copy()
    yield 0, g.copy(), r.copy()

    if isinstance(method, GradientDescent):
        contraction = 1.0 - method.alpha * s
        for t in range(T):
            g = g + method.alpha * r
            r = contraction * r
            _raise_if_nonfinite(t + 1, s, g, r)
            yield t + 1, g, r
    elif isinstance(method, NuMethod):
        for t in range(T):
            a, b = nu_params(t + 1, method.nu, method.kappa2)
            # g obeys the same recursion as the iterates (u = g(M) y)
            g_next = g + b * (g - g_prev) + a * r
            r_next = r + b * (r - r_prev) - a * s * r
            g_prev, r_prev, g, r = g, r, g_next, r_next
            _raise_if_nonfinite(t + 1, s, g, r)
            yield t + 1, g, r
    elif isinstance(method, Nesterov):
        contraction = 1.0 - method.alpha * s
        for t in range(T):
            # beta_0 multiplies r_0 - r_{-1} = 0, so its value is irrelevant
            b = nesterov_beta(t, method.beta) if t >= 1 else 0.0
            g_next = contraction * (g + b * (g - g_prev)) + method.alpha
            r_next = contraction * (r + b * (r - r_prev))
            g_prev, r_prev, g, r = g, r, g_next, r_next
            _raise_if_nonfinite(t + 1, s, g, r)
            yield t + 1, g, r
    else:
        raise DomainError(f"unsupported method {method!r}")


def evaluate(method: FilterMethod, sigma, t: int) -> tuple[np.ndarray, np.ndarray]:
    """``(g_t(sigma), r_t(sigma))`` at a single iteration count."""
    for k, g, r in iter_filters(method, sigma, t):
        if k == t:
            return g, r
    raise AssertionError("unreachable")


@dataclass
class FilterTrace:
    """``g_t`` and ``r_t`` sampled on a grid for ``t = 0..T`` (rows indexed by t)."""

    method: FilterMethod
    sigma: np.ndarray
    g: np.ndarray
    r: np.ndarray

    @property
    def T(self) -> int:
        return self.g.shape[0] - 1

    def lambda_of_t(self, t: int) -> float:
        return self.method.lam(t)

    def identity_defect(self) -> float:
        """Largest ``|r_t + sigma g_t - 1|`` over the trace."""
        return float(np.max(np.abs(self.r + self.sigma * self.g - 1.0)))


def check_grid(sigma, kappa2: float) -> np.ndarray:
    s = np.asarray(sigma, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise DomainError("sigma grid must be a non-empty 1-d array")
    if np.any(s <= 0) or np.any(s > kappa2 * (1 + 1e-12)):
        raise DomainError(f"sigma values must lie in (0, kappa2={kappa2}]")
    if np.any(np.diff(s) <= 0):
        raise DomainError("sigma grid must be strictly increasing")
    return s


def filter_trace(method: FilterMethod, sigma_grid, T: int) -> FilterTrace:
    """Evaluate ``g_t`` and ``r_t`` of ``method`` on ``sigma_grid`` for ``t <= T``."""
    if T < 1:
        raise DomainError(f"T must be >= 1, got {T}")
    s = check_grid(sigma_grid, method.kappa2)
    g = np.empty((T + 1, s.size))
    r = np.empty((T + 1, s.size))
    for t, gt, rt in iter_filters(method, s, T):
        g[t] = gt
        r[t] = rt
    return FilterTrace(method=method, sigma=s, g=g, r=r)


def gd_maximizers(alpha: float, qs, T: int, kappa2: float) -> np.ndarray:
    """Points ``q/(alpha (t+q))`` where ``s^q (1 - alpha s)^t`` peaks, for t = 1..T."""
    t = np.arange(1, T + 1, dtype=float)
    pts = np.concatenate([q / (alpha * (t + q)) for q in qs if q > 0])
    return pts[(pts > 0) & (pts <= kappa2)]


def default_grid(kappa2: float = 1.0, points: int = 512, lower: float = 1e-8, extra=()) -> np.ndarray:
    """Log-spaced grid on ``[lower, kappa2]`` merged with ``extra`` nodes."""
    base = np.geomspace(lower, kappa2, points)
    base[-1] = kappa2
    extra = np.asarray(extra, dtype=float)
    extra = extra[(extra > 0) & (extra <= kappa2)]
    return np.unique(np.concatenate([base, extra]))


def qualification_sup(trace: FilterTrace, q: float) -> np.ndarray:
    """``max_sigma sigma^q |r_t(sigma)|`` for every row of the trace.

    The result is indexed by t (entry 0 corresponds to t = 0).
    """
    if q < 0:
        raise DomainError(f"q must be >= 0, got {q}")
    return np.max(trace.sigma**q * np.abs(trace.r), axis=1)


def fit_loglog_slope(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("log-log fit needs strictly positive values")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def qualification_slope(s, t_min: int, t_max: int) -> float:
    """Least-squares slope of ``log s(t)`` against ``log t`` for ``t_min <= t <= t_max``.

    ``s`` is indexed by t, as returned by :func:`qualification_sup`.
    """
    if t_min < 1 or t_max < 2 * t_min:
        raise DomainError("window must satisfy 1 <= t_min and t_max >= 2 t_min")
    s = np.asarray(s, dtype=float)
    if t_max >= s.size:
        raise DomainError(f"window end {t_max} beyond available t={s.size - 1}")
    t = np.arange(t_min, t_max + 1)
    return fit_loglog_slope(t, s[t])


@dataclass
class NesterovAuxiliary:
    """Auxiliary polynomial ``R_t`` of the Nesterov residual analysis.

    ``margin[t]`` is ``max_sigma sigma r_t^2 - theta_{t-1}^2 (1-alpha sigma)^{t+1} / alpha``
    (negative when the pointwise bound holds); ``margin[0]`` is NaN.
    """

    sigma: np.ndarray
    R: Optional[np.ndarray]
    max_abs_R: np.ndarray
    margin: np.ndarray
    margin_argmax: np.ndarray


def nesterov_auxiliary(sigma_grid, T: int, alpha: float, beta: float = 1.0, kappa2: float = 1.0,
                       *, keep_R: bool = True, validate: bool = True) -> NesterovAuxiliary:
    """Run the ``R_t`` recursion alongside the residuals on a grid.

    With ``keep_R=False`` only the per-t summaries are stored (``R`` is None);
    ``validate=False`` skips the step-size check so violations can be observed.
    """
    method = Nesterov(alpha=alpha, beta=beta, kappa2=kappa2, validate=validate)
    s = check_grid(sigma_grid, kappa2)
    R = np.empty((T + 1, s.size)) if keep_R else None
    max_abs_R = np.empty(T + 1)
    margin = np.full(T + 1, np.nan)
    where = np.zeros(T + 1, dtype=int)
    contraction = 1.0 - alpha * s
    power = contraction.copy()  # (1 - alpha s)^{t+1}
    R_t = np.ones_like(s)
    for t, _, r in iter_filters(method, s, T):
        if t > 0:
            theta_prev = nesterov_theta(t - 1, beta)
            power = power * contraction
            gap = s * r**2 - theta_prev**2 * power / alpha
            where[t] = int(np.argmax(gap))
            margin[t] = gap[where[t]]
        if keep_R:
            R[t] = R_t
        max_abs_R[t] = np.max(np.abs(R_t))
        theta = nesterov_theta(t, beta)
        R_t = -(alpha * s / theta) * (1 - theta) * r + contraction * R_t
    return NesterovAuxiliary(sigma=s, R=R, max_abs_R=max_abs_R, margin=margin, margin_argmax=where)


def _gauss_legendre_adaptive(f, a, b, nodes, tol, max_depth=40):
    x, w = np.polynomial.legendre.leggauss(nodes)

    def rule(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return half * np.dot(w, f(mid + half * x))

    total = 0.0
    worst = 0.0
    stack = [(a, b, rule(a, b), 0)]
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        err = abs(left + right - coarse)
        if err <= tol:
            total += left + right
            continue
        if depth >= max_depth:
            worst = max(worst, err)
            total += left + right
            continue
        stack.append((lo, mid, left, depth + 1))
        stack.append((mid, hi, right, depth + 1))
    if worst > 0:
        raise NumericError(f"adaptive quadrature did not converge (panel residual {worst:.3e})")
    return total


def jacobi_weight_integral(f, nu: float, nodes: int = 20, tol: float = 1e-6, delta: float = 1e-3) -> float:
    """``int_0^1 f(s) s^(2nu - 1/2) (1-s)^(-1/2) ds`` for a smooth ``f``.

    The endpoint singularity at 1 is removed with ``1 - s = u^2`` on
    ``[1 - delta, 1]``; both pieces use adaptive Gauss-Legendre panels.
    """
    p = 2 * nu - 0.5

    def body(s):
        return f(s) * s**p / np.sqrt(1.0 - s)

    def tail(u):
        s = 1.0 - u * u
        return 2.0 * f(s) * s**p

    return _gauss_legendre_adaptive(body, 0.0, 1.0 - delta, nodes, tol) + _gauss_legendre_adaptive(
        tail, 0.0, np.sqrt(delta), nodes, tol
    )


def jacobi_orthogonality(nu: float, t: int, s: int, nodes: int = 20, tol: float = 1e-6) -> float:
    """Inner product of nu-method residuals ``r_t, r_s`` under the shifted Jacobi weight."""
    if t < 1 or s < 1:
        raise DomainError("residual indices must be >= 1")
    method = NuMethod(nu=nu, kappa2=1.0)
    top = max(t, s)

    def f(x):
        rows = {}
        for k, _, r in iter_filters(method, x, top):
            if k in (t, s):
                rows[k] = r
        return rows[t] * rows[s]

    return jacobi_weight_integral(f, nu, nodes=nodes, tol=tol)
