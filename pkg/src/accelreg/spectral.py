"""Symmetric eigendecomposition and functions of PSD matrices.

The eigensolver is a cyclic Jacobi method in round-robin (parallel) order:
each round rotates ``n/2`` disjoint index pairs at once, which keeps the
inner loop vectorized.  It is the exact oracle for the iterative solvers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError
from .filters import FilterMethod, evaluate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs sorted by descending eigenvalue.

    ``clipped_min`` records the smallest eigenvalue before PSD clipping (or
    the smallest eigenvalue when no clipping was requested).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clipped_min: float = 0.0

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.T

    def apply(self, values, v):
        """``U diag(values) U^T v``; ``v`` may be a vector or a matrix of columns."""
        U = self.eigenvectors
        coeffs = U.T @ v
        if coeffs.ndim == 1:
            return U @ (values * coeffs)
        return U @ (values[:, None] * coeffs)


def _round_robin(n):
    """Disjoint pair schedules covering every index pair once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _offdiag_norm(A):
    off = A - np.diag(np.diag(A))
    return np.sqrt(np.sum(off * off))


def jacobi_eigh(A, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``.  Returns unsorted ``(w, V)`` with ``A V = V diag(w)``.
    """
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), V
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), V
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        if _offdiag_norm(A) <= tol * scale:
            break
        for p, q in rounds:
            apq = A[p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            app, aqq = A[p, p], A[q, q]
            tau = (aqq - app) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # A <- J^T A J with J = [[c, s], [-s, c]] on each (p, q) plane
            Ap, Aq = A[p, :], A[q, :]
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            Ap, Aq = A[:, p], A[:, q]
            A[:, p] = Ap * c - Aq * s
            A[:, q] = Ap * s + Aq * c
            Vp, Vq = V[:, p], V[:, q]
            V[:, p] = Vp * c - Vq * s
            V[:, q] = Vp * s + Vq * c
    else:
        off = _offdiag_norm(A)
        if off > tol * scale:
            raise NumericError(f"Jacobi eigensolver did not converge: off-diagonal norm {off:.3e}")
    return A.diagonal().copy(), V


def sym_eig(A, *, psd: bool = False, method: str = "jacobi") -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Parameters
    ----------
    A : array_like
        Symmetric matrix (checked to 1e-12 relative).
    psd : bool
        Clip negative eigenvalues to zero; a minimum below ``-1e-8 ||A||``
        is logged as a warning.
    method : {"jacobi", "lapack"}
        ``"lapack"`` defers to :func:`numpy.linalg.eigh` for large inputs.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    amax = np.max(np.abs(A)) if A.size else 0.0
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * max(amax, np.finfo(float).tiny):
        raise DomainError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    if method == "jacobi":
        w, V = jacobi_eigh(A)
    elif method == "lapack":
        w, V = np.linalg.eigh(A)
    else:
        raise DomainError(f"unknown eigensolver {method!r}")
    order = np.argsort(w)[::-1]
    w, V = w[order], V[:, order]
    lowest = float(w[-1]) if w.size else 0.0
    if psd:
        if lowest < -1e-8 * max(amax, np.finfo(float).tiny):
            log.warning("PSD input has eigenvalue %.3e below tolerance; clipping to 0", lowest)
        w = np.maximum(w, 0.0)
    return EigenDecomposition(eigenvalues=w, eigenvectors=V, clipped_min=lowest)


def filter_values(method: FilterMethod, t: int, eigenvalues) -> np.ndarray:
    """``g_t`` at the eigenvalues, checking they lie in ``[0, kappa2]``."""
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam > method.kappa2 * (1 + 1e-12)):
        raise DomainError(
            f"eigenvalue {lam.max():.6g} exceeds kappa2={method.kappa2:.6g}; re-estimate kappa2 >= ||M||"
        )
    if np.any(lam < 0):
        raise DomainError("filters are applied to PSD spectra; clip negative eigenvalues first")
    g, _ = evaluate(method, lam, t)
    return g


def apply_filter(method: FilterMethod, t: int, eig: EigenDecomposition, v) -> np.ndarray:
    """``g_t(A) v`` through the eigendecomposition of ``A``."""
    return eig.apply(filter_values(method, t, eig.eigenvalues), np.asarray(v, dtype=float))


def matrix_power_apply(eig: EigenDecomposition, r: float, v) -> np.ndarray:
    """``A^r v`` for PSD ``A`` with the conventions ``0^0 = 1`` and ``0^r = 0``."""
    lam = eig.eigenvalues
    if np.any(lam < -1e-12):
        raise DomainError("matrix power needs a PSD spectrum")
    lam = np.maximum(lam, 0.0)
    if r < 0 and np.any(lam == 0):
        raise DomainError("negative power of a singular matrix")
    if r == 0:
        values = np.ones_like(lam)
    else:
        values = np.zeros_like(lam)
        pos = lam > 0
        values[pos] = lam[pos] ** r
    return eig.apply(values, np.asarray(v, dtype=float))


def effective_dimension(eigenvalues, lam: float) -> float:
    """``sum_i s_i / (s_i + lam)``, i.e. ``Tr(L (L + lam I)^-1)``."""
    if lam <= 0:
        raise DomainError(f"regularization parameter must be positive, got {lam}")
    s = np.asarray(eigenvalues, dtype=float)
    if np.any(s < 0):
        raise DomainError("effective dimension needs non-negative eigenvalues")
    return float(np.sum(s / (s + lam)))
