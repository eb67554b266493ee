"""Synthetic kernel regression problem on ``N`` points with a known spectrum.

The integral operator is ``L = U diag(d) U^T`` with ``d_i = i^-gamma`` and an
orthogonal ``U`` that is never materialized.  Kernel values are
``K(z_i, z_j) = N L_ij`` so that the ``1/N``-weighted integral operator is
exactly ``L``.  Functions on the points are length-``N`` vectors with the
``L^2`` norm ``(1/N) sum f_k^2``.

Coordinates: a function ``f = sqrt(N) U a`` has ``||f||^2 = |a|^2``.  The
target is ``f_H = L^r g0`` with ``g0 = sqrt(N) U c``, so its coefficients are
``d^r c``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.fft import dct, idct

from .errors import DomainError
from .filters import FilterMethod, iter_filters

MAX_POINTS = 10**5


class IdentityMixer:
    """``U = I``; useful for hand-checkable diagonal problems."""

    def __init__(self, N: int):
        self.N = N

    def apply(self, X):
        return np.array(X, dtype=float, copy=True)

    def apply_t(self, X):
        return np.array(X, dtype=float, copy=True)


class DCTMixer:
    """Orthogonal ``U`` built from rounds of (permutation, random signs, orthonormal DCT-II).

    Every round spreads each coordinate over all ``N`` outputs, so a few
    rounds give delocalized eigenvectors at ``O(N log N)`` cost per column.
    """

    def __init__(self, N: int, rng: np.random.Generator, rounds: int = 3):
        self.N = N
        self.perms = [rng.permutation(N) for _ in range(rounds)]
        self.signs = [rng.choice([-1.0, 1.0], N) for _ in range(rounds)]

    @staticmethod
    def _scale_rows(X, s):
        return X * (s if X.ndim == 1 else s[:, None])

    def apply_t(self, X):
        """``U^T X`` for a vector or a matrix of columns."""
        X = np.asarray(X, dtype=float)
        for p, s in zip(self.perms, self.signs):
            X = dct(self._scale_rows(X[p], s), type=2, norm="ortho", axis=0)
        return X

    def apply(self, X):
        """``U X``, the inverse of :meth:`apply_t`."""
        X = np.asarray(X, dtype=float)
        for p, s in zip(self.perms[::-1], self.signs[::-1]):
            X = self._scale_rows(idct(X, type=2, norm="ortho", axis=0), s)
            Y = np.empty_like(X)
            Y[p] = X
            X = Y
        return X


class HouseholderMixer:
    """``U = H_1 H_2 ... H_m`` with Householder reflectors from Gaussian vectors.

    With ``m`` much smaller than ``N`` the product stays close to the
    identity on most of the space; the DCT mixer is the default for that
    reason.
    """

    def __init__(self, N: int, rng: np.random.Generator, reflectors: Optional[int] = None):
        m = min(N, 200) if reflectors is None else reflectors
        V = rng.standard_normal((m, N))
        self.N = N
        self.V = V / np.linalg.norm(V, axis=1, keepdims=True)

    def _reflect(self, X, order):
        X = np.array(X, dtype=float, copy=True)
        for v in order:
            if X.ndim == 1:
                X -= 2.0 * v * (v @ X)
            else:
                X -= 2.0 * np.outer(v, v @ X)
        return X

    def apply(self, X):
        return self._reflect(X, self.V[::-1])

    def apply_t(self, X):
        return self._reflect(X, self.V)


def make_mixer(kind: str, N: int, rng: np.random.Generator):
    if kind == "dct":
        return DCTMixer(N, rng)
    if kind == "householder":
        return HouseholderMixer(N, rng)
    if kind == "identity":
        return IdentityMixer(N)
    raise DomainError(f"unknown mixer {kind!r}")


@dataclass(frozen=True, eq=False)
class SyntheticProblem:
    """A generated problem; treat as immutable.

    ``coef`` holds the eigen-coefficients ``c`` of ``g0`` and ``target``
    those of ``f_H`` (``d^r c``).
    """

    N: int
    gamma: float
    r: float
    noise: float
    d: np.ndarray
    coef: np.ndarray
    g0: np.ndarray
    f_H: np.ndarray
    y: np.ndarray
    mixer: object

    @property
    def target(self) -> np.ndarray:
        return self.d**self.r * self.coef

    def operator_apply(self, v) -> np.ndarray:
        """``L v`` without forming ``L``."""
        return self.mixer.apply(self.d * self.mixer.apply_t(v))

    def kernel_columns(self, indices) -> np.ndarray:
        """``K(z_k, z_{i_j})`` for all ``k`` as an ``N x n`` matrix."""
        W = self.features(indices)
        return self.N * self.mixer.apply(self.d[:, None] * W)

    def features(self, indices) -> np.ndarray:
        """``U^T`` applied to the indicator columns of ``indices`` (``N x n``)."""
        idx = np.asarray(indices, dtype=int)
        E = np.zeros((self.N, idx.size))
        E[idx, np.arange(idx.size)] = 1.0
        return self.mixer.apply_t(E)

    @functools.cached_property
    def kappa2(self) -> float:
        """``max_k K(z_k, z_k)``, computed blockwise from ``U diag(d) U^T``."""
        diag = np.zeros(self.N)
        block = 1000
        for start in range(0, self.N, block):
            stop = min(start + block, self.N)
            cols = np.zeros((self.N, stop - start))
            cols[np.arange(start, stop), np.arange(stop - start)] = np.sqrt(self.d[start:stop])
            diag += np.sum(self.mixer.apply(cols) ** 2, axis=1)
        return float(self.N * diag.max())


def generate_problem(
    N: int,
    gamma: float = 1.0,
    r: float = 0.5,
    noise: float = 0.5,
    seed: int = 0,
    *,
    source_norm: float = 1.0,
    source_decay: float = 1.0,
    mixer: str = "dct",
    spike: Optional[int] = None,
) -> SyntheticProblem:
    """Generate a problem deterministically from ``seed``.

    Parameters
    ----------
    N : int
        Number of points (``2 <= N <= 1e5``).
    gamma, r : float
        Spectrum decay ``d_i = i^-gamma`` and source exponent ``f_H = L^r g0``.
    noise : float
        Standard deviation of the Gaussian label noise.
    source_norm : float
        ``||g0||``, i.e. ``sqrt((1/N) sum g0^2)``.
    source_decay : float
        Eigen-coefficients of ``g0`` are ``xi_i i^(-source_decay/2)`` before
        normalization; 0 gives an isotropic Gaussian ``g0``.
    mixer : {"dct", "householder", "identity"}
    spike : int, optional
        1-based eigen-index; replaces ``g0`` by ``source_norm sqrt(N) U e_spike``.
    """
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    if N > MAX_POINTS:
        raise DomainError(f"N={N} exceeds the resource guard {MAX_POINTS}")
    if gamma < 1 or r < 0 or noise < 0 or source_norm < 0:
        raise DomainError("need gamma >= 1, r >= 0, noise >= 0 and source_norm >= 0")
    rng = np.random.default_rng(seed)
    U = make_mixer(mixer, N, rng)
    i = np.arange(1, N + 1, dtype=float)
    d = i**-gamma
    if spike is None:
        c = rng.standard_normal(N) * i ** (-source_decay / 2.0)
        c *= source_norm / np.linalg.norm(c)
    else:
        if not 1 <= spike <= N:
            raise DomainError(f"spike index must lie in [1, {N}]")
        c = np.zeros(N)
        c[spike - 1] = source_norm
    root = np.sqrt(N)
    g0 = root * U.apply(c)
    f_H = g0.copy() if r == 0 else root * U.apply(d**r * c)
    y = f_H + noise * rng.standard_normal(N) if noise > 0 else f_H.copy()
    return SyntheticProblem(N=N, gamma=gamma, r=r, noise=noise, d=d, coef=c, g0=g0, f_H=f_H, y=y, mixer=U)


@dataclass(frozen=True, eq=False)
class Sample:
    """``n`` drawn points with Gram ``K_hat = N W^T diag(d) W`` and ``M = K_hat/n``."""

    indices: np.ndarray
    K_hat: np.ndarray
    y_hat: np.ndarray
    M: np.ndarray
    W: np.ndarray

    @property
    def n(self) -> int:
        return self.indices.size


def draw_sample(problem: SyntheticProblem, n: int, seed: int, *, replace: bool = True) -> Sample:
    """Draw ``n`` indices uniformly (with replacement unless ``replace=False``)."""
    if not 1 <= n <= problem.N:
        raise DomainError(f"sample size n={n} outside [1, {problem.N}]")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, problem.N, n) if replace else rng.permutation(problem.N)[:n]
    W = problem.features(idx)
    K = problem.N * (W.T @ (problem.d[:, None] * W))
    K = 0.5 * (K + K.T)
    return Sample(indices=idx, K_hat=K, y_hat=problem.y[idx].copy(), M=K / n, W=W)


def excess_risk(f_hat, problem: SyntheticProblem) -> float:
    """``(1/N) sum_k (f_hat_k - f_H_k)^2``."""
    f_hat = np.asarray(f_hat, dtype=float)
    if f_hat.shape != (problem.N,):
        raise DomainError(f"expected a length-{problem.N} vector, got shape {f_hat.shape}")
    diff = f_hat - problem.f_H
    return float(np.mean(diff * diff))


def weighted_error(f_hat, problem: SyntheticProblem, a: float) -> float:
    """``(1/N) sum_i d_i^(-2a) (U^T (f_hat - f_H))_i^2``; ``a = 0`` is the excess risk."""
    if not 0 <= a <= 0.5:
        raise DomainError(f"a must lie in [0, 1/2], got {a}")
    diff = problem.mixer.apply_t(np.asarray(f_hat, dtype=float) - problem.f_H)
    return float(np.mean(problem.d ** (-2 * a) * diff * diff))


class RiskEvaluator:
    """Excess risk of ``f_hat = (1/n) K_cross u`` as a quadratic form in ``u``.

    With ``B = diag(d) W`` and ``s = sqrt(N)/n``, the estimator has
    eigen-coefficients ``s B u``, so
    ``risk(u) = s^2 u^T B^T B u - 2 s u^T B^T a + |a|^2`` with ``a`` the
    target coefficients.  This avoids forming the ``N x n`` cross kernel.
    """

    def __init__(self, problem: SyntheticProblem, sample: Sample):
        B = problem.d[:, None] * sample.W
        a = problem.target
        s = np.sqrt(problem.N) / sample.n
        self.P = s * s * (B.T @ B)
        self.q = s * (B.T @ a)
        self.f2 = float(a @ a)

    def __call__(self, u) -> np.ndarray:
        """Risk for one coefficient vector or for every row of a matrix."""
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return np.asarray(max(u @ self.P @ u - 2 * u @ self.q + self.f2, 0.0))
        quad = np.sum((u @ self.P) * u, axis=1)
        return np.maximum(quad - 2 * u @ self.q + self.f2, 0.0)


def bias_curve(method: FilterMethod, d, a, T: int) -> np.ndarray:
    """``sum_i r_t(d_i)^2 a_i^2`` for ``t = 0..T``."""
    d = np.asarray(d, dtype=float)
    w = np.asarray(a, dtype=float) ** 2
    out = np.empty(T + 1)
    for t, _, r in iter_filters(method, d, T):
        out[t] = np.sum(r * r * w)
    return out


def population_bias(problem: SyntheticProblem, method: FilterMethod, T: int) -> np.ndarray:
    """Infinite-sample squared bias ``||r_t(L) f_H||^2`` for ``t = 0..T``.

    ``method`` must be set up for ``kappa2 = 1`` (the operator norm of ``L``).
    """
    return bias_curve(method, problem.d, problem.target, T)


def halving_time(curve) -> int:
    """First ``t`` with ``curve[t] <= curve[0]/2``; -1 if never reached."""
    curve = np.asarray(curve)
    hits = np.nonzero(curve <= 0.5 * curve[0])[0]
    return int(hits[0]) if hits.size else -1
