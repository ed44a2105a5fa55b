"""Offset and constrained Decision-Estimation Coefficient solvers.

The offset DEC is a finite matrix game: the min player picks p over
decisions, the max player picks a model, and the payoff is

    E_p[ f_M(best_M) - f_M(pi) - gamma * D(M(pi), Mhat(pi)) ].

Explicit model lists are solved exactly by linear programming with cutting
planes (double oracle); a Hedge-vs-best-response solver is kept as an option.
Implicit classes only need a best-response routine.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..numprob import LpProblem, hellinger_sq, hellinger_sq_gaussian, solve_lp

DIVERGENCES = ("sq", "hellinger_gaussian", "hellinger_bernoulli", "hellinger")


def divergence_table(means, ref_means, kind: str, obs=None, ref_obs=None) -> np.ndarray:
    """D(M_k(pi), Mhat(pi)) for every model row k and decision pi."""
    F = np.atleast_2d(np.asarray(means, dtype=float))
    f0 = np.asarray(ref_means, dtype=float)
    if kind == "sq":
        return (F - f0) ** 2
    if kind == "hellinger_gaussian":
        return -np.expm1(-((F - f0) ** 2) / 8.0)
    if kind == "hellinger_bernoulli":
        return (np.sqrt(F) - np.sqrt(f0)) ** 2 + (np.sqrt(1 - F) - np.sqrt(1 - f0)) ** 2
    if kind == "hellinger":
        O = np.asarray(obs, dtype=float)
        O0 = np.asarray(ref_obs, dtype=float)
        return ((np.sqrt(O) - np.sqrt(O0[None])) ** 2).sum(-1)
    raise ValueError(f"unknown divergence {kind!r}; choose from {DIVERGENCES}")


@dataclass
class DecProblem:
    """Explicit finite model list. ``means[k, pi]`` is the mean reward of pi under model k."""

    means: np.ndarray
    ref_means: np.ndarray
    gamma: float
    divergence: str = "sq"
    obs: np.ndarray | None = None      # (K, n, m) observation laws for "hellinger"
    ref_obs: np.ndarray | None = None  # (n, m)

    def __post_init__(self):
        self.means = np.atleast_2d(np.asarray(self.means, dtype=float))
        self.ref_means = np.asarray(self.ref_means, dtype=float).ravel()
        if self.means.shape[1] != self.ref_means.size:
            raise ValueError("models and reference must share the decision set")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")

    @property
    def n(self) -> int:
        return self.ref_means.size

    def regret_table(self) -> np.ndarray:
        return self.means.max(axis=1, keepdims=True) - self.means

    def div_table(self) -> np.ndarray:
        return divergence_table(self.means, self.ref_means, self.divergence, self.obs, self.ref_obs)

    def payoff_table(self) -> np.ndarray:
        return self.regret_table() - self.gamma * self.div_table()

    # implicit-class protocol
    def best_response(self, p) -> tuple[np.ndarray, float]:
        G = self.payoff_table()
        vals = G @ p
        k = int(np.argmax(vals))
        return G[k], float(vals[k])

    def with_gamma(self, gamma: float) -> "DecProblem":
        return DecProblem(self.means, self.ref_means, gamma, self.divergence, self.obs, self.ref_obs)


@dataclass
class GridDecProblem:
    """Structured-bandit DEC over the product class ``grid^A`` with squared mean gap.

    The max player's best response separates across coordinates once the
    optimal decision and its value are fixed, so the class is never enumerated.
    """

    grid: np.ndarray
    ref_means: np.ndarray
    gamma: float

    def __post_init__(self):
        self.grid = np.sort(np.asarray(self.grid, dtype=float))
        self.ref_means = np.asarray(self.ref_means, dtype=float).ravel()

    @property
    def n(self) -> int:
        return self.ref_means.size

    def payoff_row(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        return f.max() - f - self.gamma * (f - self.ref_means) ** 2

    def best_response(self, p) -> tuple[np.ndarray, float]:
        p = np.asarray(p, dtype=float)
        g, fh, A = self.grid, self.ref_means, self.n
        # h[pi, j]: contribution of decision pi when f(pi) = g[j], excluding the max term
        h = -p[:, None] * (g[None, :] + self.gamma * (g[None, :] - fh[:, None]) ** 2)
        arg_pref = np.zeros_like(h, dtype=int)
        best_pref = np.empty_like(h)
        best_pref[:, 0], arg_pref[:, 0] = h[:, 0], 0
        for j in range(1, g.size):
            better = h[:, j] > best_pref[:, j - 1]
            best_pref[:, j] = np.where(better, h[:, j], best_pref[:, j - 1])
            arg_pref[:, j] = np.where(better, j, arg_pref[:, j - 1])
        total_pref = best_pref.sum(axis=0)  # (G,)
        best_val, best_f = -np.inf, None
        for a in range(A):
            # decision a attains the max u = g[j]
            vals = g + h[a] + total_pref - best_pref[a]
            j = int(np.argmax(vals))
            if vals[j] > best_val:
                best_val = float(vals[j])
                f = g[arg_pref[:, j]].copy()
                f[a] = g[j]
                best_f = f
        return self.payoff_row(best_f), best_val


@dataclass
class SaddleCertificate:
    p: np.ndarray
    value: float          # lower bound on the DEC (restricted-game value or dual average)
    upper: float          # max over the class of payoff(p, M); the DEC is at most this
    gap: float
    payoffs: np.ndarray | None = None
    iterations: int = 0
    flagged: bool = False
    method: str = "lp"

    def to_json(self) -> dict:
        return {"p": self.p.tolist(), "value": self.value, "upper": self.upper, "gap": self.gap,
                "payoffs": None if self.payoffs is None else self.payoffs.tolist(),
                "iterations": self.iterations, "flagged": self.flagged, "method": self.method}


def _solve_restricted(rows: np.ndarray) -> tuple[np.ndarray, float]:
    """min_p max_k rows[k] @ p by LP over (p, v)."""
    K, n = rows.shape
    c = np.zeros(n + 1)
    c[-1] = 1.0
    A_ub = np.hstack([rows, -np.ones((K, 1))])
    A_eq = np.concatenate([np.ones(n), [0.0]])[None]
    lb = np.concatenate([np.zeros(n), [float(rows.min()) - 1.0]])
    res = solve_lp(LpProblem(c, A_ub, np.zeros(K), A_eq, np.ones(1), lb))
    if not res.ok:
        raise RuntimeError(f"restricted DEC program failed: {res.status}")
    p = np.clip(res.x[:n], 0.0, None)
    return p / p.sum(), float(res.x[-1])


def dec_offset(problem, iters: int = 2000, tol: float = 1e-3, method: str = "lp") -> SaddleCertificate:
    if method == "hedge":
        return _dec_hedge(problem, iters, tol)
    if method != "lp":
        raise ValueError(f"unknown method {method!r}")
    n = problem.n
    p = np.full(n, 1.0 / n)
    row, upper = problem.best_response(p)
    rows = [row]
    lower = -np.inf
    best_p, best_upper = p, upper
    for it in range(1, iters + 1):
        p, lower = _solve_restricted(np.array(rows))
        row, upper = problem.best_response(p)
        if upper < best_upper:
            best_p, best_upper = p, upper
        if best_upper - lower <= 1e-10 or any(np.array_equal(row, r) for r in rows):
            break
        rows.append(row)
    payoffs = problem.payoff_table() @ best_p if isinstance(problem, DecProblem) else None
    gap = max(best_upper - lower, 0.0)
    return SaddleCertificate(best_p, float(lower), float(best_upper), float(gap), payoffs, it,
                             gap > tol, "lp")


def _dec_hedge(problem: DecProblem, iters: int, tol: float) -> SaddleCertificate:
    G = problem.payoff_table()
    K, n = G.shape
    eta = math.sqrt(8 * math.log(max(K, 2)) / iters)
    logw = np.zeros(K)
    q_avg = np.zeros(K)
    p_avg = np.zeros(n)
    span = max(float(G.max() - G.min()), 1e-12)
    for _ in range(iters):
        q = np.exp(logw - logw.max())
        q /= q.sum()
        j = int(np.argmin(q @ G))  # min player: point mass on best decision vs. the mixture
        q_avg += q
        p_avg[j] += 1
        logw += eta * G[:, j] / span
    q_avg /= iters
    p_avg /= iters
    payoffs = G @ p_avg
    upper = float(payoffs.max())
    lower = float((q_avg @ G).min())
    gap = upper - lower
    return SaddleCertificate(p_avg, lower, upper, gap, payoffs, iters, gap > tol, "hedge")


def grid_oracle(problem: DecProblem, resolution: float = 0.005) -> tuple[float, np.ndarray]:
    """Brute-force min over a simplex grid of the max payoff (test oracle)."""
    G = problem.payoff_table()
    best, best_p = np.inf, None
    for p in simplex_grid(problem.n, resolution):
        v = (G @ p.T).max(axis=0)
        i = int(np.argmin(v))
        if v[i] < best:
            best, best_p = float(v[i]), p[i]
    return best, best_p


def simplex_grid(n: int, resolution: float, chunk: int = 200_000):
    """Yield arrays of simplex points with coordinates on multiples of ``resolution``."""
    N = int(round(1.0 / resolution))
    if abs(N * resolution - 1.0) > 1e-9:
        raise ValueError("resolution must divide 1")
    buf = []
    for comp in _compositions(N, n):
        buf.append(comp)
        if len(buf) >= chunk:
            yield np.array(buf, dtype=float) / N
            buf = []
    if buf:
        yield np.array(buf, dtype=float) / N


def _compositions(N: int, n: int):
    if n == 1:
        yield (N,)
        return
    for cuts in itertools.combinations(range(N + n - 1), n - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(N + n - 2 - prev)
        yield tuple(out)


MAX_CONSTRAINED_DECISIONS = 4


def dec_constrained(problem: DecProblem, eps: float, resolution: float = 0.005,
                    refine_check: bool = False):
    """min over a simplex grid of max constrained regret; an empty constraint set counts as 0.

    With ``refine_check`` also returns the value at twice the resolution step so
    callers can judge grid error.
    """
    if problem.n > MAX_CONSTRAINED_DECISIONS:
        raise ValueError(f"grid mode supports at most {MAX_CONSTRAINED_DECISIONS} decisions")

    def solve(res):
        Reg = problem.regret_table()
        D = problem.div_table()
        best = np.inf
        for P in simplex_grid(problem.n, res):
            reg = Reg @ P.T  # (K, m)
            feas = (D @ P.T) <= eps ** 2 + 1e-12
            vals = np.where(feas, reg, -np.inf).max(axis=0)
            vals = np.where(np.isfinite(vals), vals, 0.0)
            best = min(best, float(vals.min()))
        return best

    v = solve(resolution)
    if refine_check:
        return v, solve(2 * resolution)
    return v
