"""Kernel functions and Gram matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DataError, DomainError


class Kernel:
    """Base class; subclasses implement :meth:`matrix` on two point sets."""

    def matrix(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x, z) -> float:
        return float(self.matrix(np.atleast_2d(x), np.atleast_2d(z))[0, 0])


@dataclass(frozen=True)
class Linear(Kernel):
    def matrix(self, X, Z):
        return X @ Z.T


@dataclass(frozen=True)
class Gaussian(Kernel):
    """``exp(-|x - z|^2 / (2 width^2))``."""

    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError(f"Gaussian width must be positive, got {self.width}")

    def matrix(self, X, Z):
        # direct differences keep K(x, x) = 1 exactly
        return np.exp(-cdist(X, Z, "sqeuclidean") / (2.0 * self.width**2))


@dataclass(frozen=True)
class Polynomial(Kernel):
    """``(<x, z> + offset)^degree``."""

    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        if self.degree < 1 or int(self.degree) != self.degree:
            raise DomainError(f"polynomial degree must be a positive integer, got {self.degree}")
        if self.offset < 0:
            raise DomainError(f"polynomial offset must be >= 0, got {self.offset}")

    def matrix(self, X, Z):
        return (X @ Z.T + self.offset) ** int(self.degree)


def make_kernel(name: str, *, width: float = 1.2, degree: int = 9, offset: float = 1.0) -> Kernel:
    if name == "linear":
        return Linear()
    if name == "gaussian":
        return Gaussian(width)
    if name == "polynomial":
        return Polynomial(degree, offset)
    raise DomainError(f"unknown kernel {name!r}")


def _as_points(points, name="points"):
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise DomainError(f"{name} must be a non-empty 2-d array of row vectors")
    bad = ~np.isfinite(X)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise DataError(f"non-finite feature in {name} at row {row}, column {col}", row=int(row), column=int(col))
    return X


def gram(points, kernel: Kernel) -> tuple[np.ndarray, float]:
    """Gram matrix ``K[j, k] = kernel(x_j, x_k)`` and the estimate ``kappa2 = max_j K[j, j]``."""
    X = _as_points(points)
    K = kernel.matrix(X, X)
    K = 0.5 * (K + K.T)
    if not np.all(np.isfinite(K)):
        raise DataError("kernel evaluation overflowed; standardize features or lower the degree")
    return K, float(np.max(np.diag(K)))


def cross_gram(eval_points, points, kernel: Kernel) -> np.ndarray:
    """``K[i, j] = kernel(z_i, x_j)`` between evaluation points and sample points."""
    Z = _as_points(eval_points, "eval_points")
    X = _as_points(points)
    if Z.shape[1] != X.shape[1]:
        raise DomainError(f"dimension mismatch: {Z.shape[1]} vs {X.shape[1]}")
    return kernel.matrix(Z, X)


def standardize(X, mean=None, scale=None):
    """Zero-mean, unit-variance columns; constant columns are left centred."""
    X = np.asarray(X, dtype=float)
    if mean is None:
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
    return (X - mean) / scale, mean, scale
