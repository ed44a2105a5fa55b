"""Policy-cover inverse gap weighting for tabular models.

Each cover policy maximizes occupancy at one (h, s, a) divided by
``2HSA + eta * gap``. Over occupancy measures this is a linear-fractional
program; the Charnes-Cooper change of variables (y = t * d) turns it into an LP.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..envs.mdp import TabularMDP, occupancy, policy_value
from ..numprob.lp import LpProblem, LpStatus, solve_lp
from .planning import value_iteration


@dataclass
class PcIgwResult:
    policies: list          # stochastic (H, S, A) tables; last one is the greedy policy
    probs: np.ndarray
    lam: float
    gaps: np.ndarray
    eta: float


def pcigw_eta(gamma: float, H: int) -> float:
    return gamma / (21 * H ** 2)


def policy_from_occupancy(d: np.ndarray) -> np.ndarray:
    """pi_h(a|s) = d_h(s,a) / sum_a d_h(s,a); unreached states play action 0."""
    mass = d.sum(-1, keepdims=True)
    pi = np.zeros_like(d)
    pi[..., 0] = 1.0
    return np.where(mass > 1e-12, d / np.where(mass > 1e-12, mass, 1.0), pi)


def _flow_constraints(mdp: TabularMDP):
    """Rows of A_eq y - t * rhs = 0 expressing occupancy flow, with y flattened (H, S, A)."""
    H, S, A = mdp.H, mdp.S, mdp.A
    n = H * S * A
    rows = []
    for h in range(H):
        for s in range(S):
            row = np.zeros(n + 1)
            row[(h * S + s) * A:(h * S + s + 1) * A] = 1.0
            if h == 0:
                row[n] = -mdp.d1[s]
            else:
                row[(h - 1) * S * A:h * S * A] -= mdp.P[h - 1][:, :, s].ravel()
            rows.append(row)
    return np.array(rows)


def cover_policy(mdp: TabularMDP, h: int, s: int, a: int, eta: float, fstar: float, flow=None):
    """Solve the ratio program for one target triple; returns (policy, occupancy, ratio)."""
    H, S, A = mdp.H, mdp.S, mdp.A
    n = H * S * A
    flow = _flow_constraints(mdp) if flow is None else flow
    norm = np.zeros(n + 1)
    norm[:n] = -eta * mdp.R.ravel()
    norm[n] = 2 * H * S * A + eta * fstar
    c = np.zeros(n + 1)
    c[(h * S + s) * A + a] = 1.0
    A_eq = np.vstack([flow, norm])
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[-1] = 1.0
    res = solve_lp(LpProblem(c, A_eq=A_eq, b_eq=b_eq, maximize=True))
    if res.status is not LpStatus.OPTIMAL:
        raise RuntimeError(f"cover program not solved: {res.status}")
    t = res.x[n]
    d = (res.x[:n] / t).reshape(H, S, A)
    return policy_from_occupancy(d), d, float(res.value)


def pcigw_distribution(mdp: TabularMDP, gamma: float, eta: float | None = None) -> PcIgwResult:
    H, S, A = mdp.H, mdp.S, mdp.A
    eta = pcigw_eta(gamma, H) if eta is None else eta
    vf, greedy_pi = value_iteration(mdp)
    fstar = vf.value(mdp.d1)
    flow = _flow_constraints(mdp)
    policies = []
    for h in range(H):
        for s in range(S):
            for a in range(A):
                policies.append(cover_policy(mdp, h, s, a, eta, fstar, flow)[0])
    g = np.zeros((H, S, A))
    np.put_along_axis(g, greedy_pi[..., None], 1.0, axis=-1)
    policies.append(g)
    gaps = np.array([max(0.0, fstar - policy_value(mdp, pi)) for pi in policies])
    lam = _normalizer(eta * gaps)
    probs = 1.0 / (lam + eta * gaps)
    return PcIgwResult(policies, probs / probs.sum(), lam, gaps, eta)


def _normalizer(scaled_gaps: np.ndarray, iters: int = 200) -> float:
    """lambda with sum 1/(lambda + g) = 1; the zero-gap greedy policy pins it to [1, N]."""
    lo, hi = 1.0, float(scaled_gaps.size)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.sum(1.0 / (mid + scaled_gaps)) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ratio_objective(mdp: TabularMDP, pi, h: int, s: int, a: int, eta: float, fstar: float) -> float:
    H, S, A = mdp.H, mdp.S, mdp.A
    return float(occupancy(mdp, pi)[h, s, a] / (2 * H * S * A + eta * (fstar - policy_value(mdp, pi))))


def dec_payoff(result: PcIgwResult, mref: TabularMDP, models, gamma: float) -> float:
    """max over ``models`` of E_{pi~p}[f^M(pi_M) - f^M(pi) - gamma * Hel^2(M(pi), Mref(pi))]."""
    from .planning import optimal_value, trajectory_hellinger_sq

    best = -np.inf
    for m in models:
        fm = optimal_value(m)
        val = sum(q * (fm - policy_value(m, pi) - gamma * trajectory_hellinger_sq(m, mref, pi))
                  for q, pi in zip(result.probs, result.policies))
        best = max(best, float(val))
    return best
