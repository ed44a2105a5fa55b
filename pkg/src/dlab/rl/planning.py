"""Exact dynamic programming on tabular MDPs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..envs.mdp import TabularMDP, as_stochastic, occupancy, policy_q


@dataclass
class ValueFunctions:
    Q: np.ndarray  # (H+1, S, A); last layer is zero
    V: np.ndarray  # (H+1, S)

    def value(self, d1) -> float:
        return float(np.asarray(d1) @ self.V[0])


def bellman_backup(mdp: TabularMDP, Q_next, h: int) -> np.ndarray:
    """[T_h Q](s, a) = r_h(s, a) + E_{s'}[max_a' Q(s', a')]."""
    return mdp.R[h] + mdp.P[h] @ np.asarray(Q_next).max(axis=-1)


def greedy(Q: np.ndarray) -> np.ndarray:
    """Deterministic greedy policy; argmax breaks ties toward action 0."""
    return np.argmax(Q, axis=-1)


def value_iteration(mdp: TabularMDP) -> tuple[ValueFunctions, np.ndarray]:
    H, S, A = mdp.H, mdp.S, mdp.A
    Q = np.zeros((H + 1, S, A))
    for h in reversed(range(H)):
        Q[h] = bellman_backup(mdp, Q[h + 1], h)
    V = Q.max(axis=-1)
    return ValueFunctions(Q, V), greedy(Q[:H])


def optimal_value(mdp: TabularMDP) -> float:
    vf, _ = value_iteration(mdp)
    return vf.value(mdp.d1)


def bellman_residuals(mdp: TabularMDP, Q) -> np.ndarray:
    """(Q_h - T_h Q_{h+1}) for h < H, with Q given as (H, S, A) or (H+1, S, A)."""
    Q = np.asarray(Q, dtype=float)
    if Q.shape[0] == mdp.H:
        Q = np.concatenate([Q, np.zeros((1, mdp.S, mdp.A))])
    return np.stack([Q[h] - bellman_backup(mdp, Q[h + 1], h) for h in range(mdp.H)])


def trajectory_hellinger_sq(m1: TabularMDP, m2: TabularMDP, policy) -> float:
    """Squared Hellinger (range [0, 2]) between trajectory laws of a policy in two MDPs.

    Rewards are deterministic, so differing reward entries make the two
    trajectories disjoint at that step.
    """
    pi = as_stochastic(policy, m1.S, m1.A, m1.H)
    W = np.ones(m1.S)
    for h in reversed(range(m1.H)):
        same_r = np.isclose(m1.R[h], m2.R[h]).astype(float)
        inner = np.sqrt(m1.P[h] * m2.P[h]) @ W  # (S, A)
        W = np.sum(pi[h] * same_r * inner, axis=-1)
    bc = float(np.sqrt(m1.d1 * m2.d1) @ W)
    return max(0.0, 2.0 - 2.0 * bc)
