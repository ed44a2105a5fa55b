"""G-optimal experimental design via Frank-Wolfe on log det with away steps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import FiniteDist


@dataclass
class DesignResult:
    design: FiniteDist
    leverages: np.ndarray  # x_i^T M(p)^+ x_i for every input point
    rank: int
    iterations: int
    converged: bool

    @property
    def max_leverage(self) -> float:
        return float(self.leverages.max())


def leverages(points, weights) -> np.ndarray:
    """Leverage of every point under the design, using the pseudo-inverse on the span."""
    X = np.asarray(points, dtype=float)
    M = X.T @ (np.asarray(weights)[:, None] * X)
    return np.einsum("ij,jk,ik->i", X, np.linalg.pinv(M, hermitian=True), X)


def _span_coords(X: np.ndarray) -> np.ndarray:
    _, s, Vt = np.linalg.svd(X, full_matrices=False)
    r = int(np.sum(s > s[0] * 1e-10))
    return X @ Vt[:r].T


def g_optimal_design(points, tol: float = 1e-3, max_iter: int = 200_000) -> DesignResult:
    """Approximate G-optimal design on the linear span of ``points``.

    Stops when every point has leverage at most ``rank * (1 + tol)`` and every
    support point has leverage at least ``rank * (1 - tol)``.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if tol <= 0:
        raise ValueError("tol must be positive")
    if X.size == 0 or not np.any(np.abs(X) > 0):
        raise ValueError("degenerate point set: all points are zero")
    Z = _span_coords(X)
    n, r = Z.shape
    nonzero = np.linalg.norm(Z, axis=1) > 0
    p = nonzero / nonzero.sum()
    converged = False
    it = 0
    for it in range(max_iter + 1):
        M = Z.T @ (p[:, None] * Z)
        Minv = np.linalg.inv(M)
        lev = np.einsum("ij,jk,ik->i", Z, Minv, Z)
        supp = p > 0
        hi = int(np.argmax(lev))
        lo_idx = np.flatnonzero(supp)
        lo = int(lo_idx[np.argmin(lev[lo_idx])])
        if lev[hi] <= r * (1 + tol) and lev[lo] >= r * (1 - tol):
            converged = True
            break
        if it == max_iter:
            break
        # pick the more violated direction: toward the max or away from the min
        if lev[hi] - r >= r - lev[lo]:
            j, ell = hi, lev[hi]
        else:
            j, ell = lo, lev[lo]
        drop = -p[j] / (1.0 - p[j]) if p[j] < 1 else 0.0
        if ell < r and ell <= 1.0 + 1e-14:
            alpha = drop  # log det increases all the way to removing the point
        else:
            alpha = (ell / r - 1.0) / (ell - 1.0)
        if alpha < 0:
            alpha = max(alpha, drop)
        p = (1 - alpha) * p
        p[j] += alpha
        p[p < 1e-15] = 0.0
        p /= p.sum()
    lev = leverages(X, p)
    return DesignResult(FiniteDist(p), lev, r, it, converged)
