"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Small, dependency-free and exact enough for the occupancy and saddle-point
programs used elsewhere in the package (at most a few hundred variables).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class LpProblem:
    """minimize (or maximize) c @ x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= lb."""

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lb: np.ndarray | None = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "inequality")
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "equality")
        self.lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).ravel()
        if self.lb.size != n:
            raise ValueError("lower-bound vector has wrong length")
        for arr in (self.c, self.A_ub, self.b_ub, self.A_eq, self.b_eq, self.lb):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")

    @property
    def n(self) -> int:
        return self.c.size


def _rows(A, b, n, what):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape != (b.size, n):
        raise ValueError(f"{what} block has shape {A.shape}, expected ({b.size}, {n})")
    return A, b


@dataclass
class LpResult:
    status: LpStatus
    value: float = float("nan")
    x: np.ndarray | None = None
    iterations: int = 0
    duals: np.ndarray | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])


def _run(T, basis, allowed, max_iter):
    """Bland-rule simplex on tableau T whose last row holds reduced costs."""
    m = T.shape[0] - 1
    it = 0
    while True:
        rc = T[-1, :-1]
        enter = -1
        for j in np.flatnonzero(rc < -PIVOT_TOL):
            if allowed[j]:
                enter = int(j)
                break
        if enter < 0:
            return LpStatus.OPTIMAL, it
        if it >= max_iter:
            return LpStatus.ITERATION_LIMIT, it
        colv = T[:m, enter]
        pos = colv > PIVOT_TOL
        if not np.any(pos):
            return LpStatus.UNBOUNDED, it
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / colv[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        leave = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, leave, enter)
        basis[leave] = enter
        it += 1


def solve_lp(problem: LpProblem, max_iter: int = 50_000) -> LpResult:
    p = problem
    n = p.n
    sign = -1.0 if p.maximize else 1.0
    c = sign * p.c
    # shift x = y + lb so that y >= 0
    b_ub = p.b_ub - p.A_ub @ p.lb
    b_eq = p.b_eq - p.A_eq @ p.lb
    m_ub, m_eq = b_ub.size, b_eq.size
    m = m_ub + m_eq
    n_struct = n + m_ub  # structural + slack columns

    A = np.zeros((m, n_struct))
    A[:m_ub, :n] = p.A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = p.A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase 1 with one artificial per row
    T = np.zeros((m + 1, n_struct + m + 1))
    T[:m, :n_struct] = A
    T[:m, n_struct:n_struct + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n_struct] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n_struct, n_struct + m))
    allowed = np.ones(n_struct + m, dtype=bool)
    status, it1 = _run(T, basis, allowed, max_iter)
    if status is LpStatus.ITERATION_LIMIT:
        return LpResult(status, iterations=it1)
    if -T[-1, -1] > FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
        return LpResult(LpStatus.INFEASIBLE, iterations=it1)

    # drive artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n_struct:
            cand = np.flatnonzero(np.abs(T[r, :n_struct]) > 1e-9)
            if cand.size:
                _pivot(T, r, int(cand[0]))
                basis[r] = int(cand[0])
                keep.append(r)
        else:
            keep.append(r)
    T = np.vstack([T[keep][:, list(range(n_struct)) + [T.shape[1] - 1]], np.zeros((1, n_struct + 1))])
    basis = [basis[r] for r in keep]
    # phase 2 objective row: reduced costs
    cfull = np.concatenate([c, np.zeros(m_ub)])
    T[-1, :n_struct] = cfull
    T[-1, -1] = 0.0
    for r, j in enumerate(basis):
        T[-1] -= cfull[j] * T[r]
    allowed = np.ones(n_struct, dtype=bool)
    status, it2 = _run(T, basis, allowed, max_iter - it1)
    its = it1 + it2
    if status is not LpStatus.OPTIMAL:
        return LpResult(status, iterations=its)
    y = np.zeros(n_struct)
    for r, j in enumerate(basis):
        y[j] = T[r, -1]
    x = y[:n] + p.lb
    value = float(p.c @ x)
    return LpResult(LpStatus.OPTIMAL, value, x, its)


def vertex_enumeration(problem: LpProblem) -> tuple[float, np.ndarray] | None:
    """Brute-force oracle: best basic feasible point. Exponential, test use only."""
    from itertools import combinations

    p = problem
    n = p.n
    # all constraints as G x <= h plus equalities
    G = np.vstack([p.A_ub, -np.eye(n)])
    h = np.concatenate([p.b_ub, -p.lb])
    best = None
    k = n - p.A_eq.shape[0]
    for active in combinations(range(G.shape[0]), k):
        M = np.vstack([p.A_eq, G[list(active)]])
        rhs = np.concatenate([p.b_eq, h[list(active)]])
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, rhs)
        if np.all(G @ x <= h + 1e-9) and np.allclose(p.A_eq @ x, p.b_eq, atol=1e-9):
            v = float(p.c @ x)
            if best is None or (v > best[0] if p.maximize else v < best[0]):
                best = (v, x)
    return best
