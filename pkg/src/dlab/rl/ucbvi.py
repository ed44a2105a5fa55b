"""Optimistic value iteration with count-based bonuses, and an epsilon-greedy baseline."""
from __future__ import annotations

import math

import numpy as np

from ..envs.mdp import TabularMDP, occupancy
from .planning import bellman_backup, greedy


class EpisodicLearner:
    name = "episodic"

    def policy(self) -> np.ndarray:
        raise NotImplementedError

    def observe_trajectory(self, traj) -> None:
        raise NotImplementedError


class UCBVI(EpisodicLearner):
    """Known rewards, empirical transitions (uniform rows where unvisited).

    Q_bar_h = min(1, r_h + P_hat_h V_bar_{h+1} + b_h) with V_bar_{H+1} = 0 and
    b = 2 sqrt(log(2 S A H T / delta) / n); unvisited pairs get bonus 1.
    """

    name = "ucbvi"

    def __init__(self, S: int, A: int, H: int, R, T: int, delta: float = 0.1, d1=None,
                 bonus_scale: float = 1.0):
        self.S, self.A, self.H, self.T = S, A, H, T
        self.bonus_scale = bonus_scale
        self.R = np.asarray(R, dtype=float)
        self.delta = delta
        self.d1 = np.full(S, 1.0 / S) if d1 is None else np.asarray(d1, dtype=float)
        self.counts = np.zeros((H, S, A, S))
        self.visits = np.zeros((H, S, A))  # the last layer has no observed successor
        self.log_term = math.log(2 * S * A * H * T / delta)
        self.Qbar = None

    def p_hat(self) -> np.ndarray:
        n = self.counts.sum(-1, keepdims=True)
        return np.where(n > 0, self.counts / np.maximum(n, 1), 1.0 / self.S)

    def bonus(self) -> np.ndarray:
        n = self.visits
        return np.where(n > 0, self.bonus_scale * 2 * np.sqrt(self.log_term / np.maximum(n, 1)), 1.0)

    def estimated_mdp(self) -> TabularMDP:
        return TabularMDP(self.p_hat(), self.R, self.d1)

    def optimistic_q(self) -> np.ndarray:
        P, b = self.p_hat(), self.bonus()
        Q = np.zeros((self.H + 1, self.S, self.A))
        for h in reversed(range(self.H)):
            Q[h] = np.minimum(1.0, self.R[h] + P[h] @ Q[h + 1].max(-1) + b[h])
        return Q

    def policy(self):
        self.Qbar = self.optimistic_q()
        return greedy(self.Qbar[: self.H])

    def optimistic_value(self, d1) -> float:
        Q = self.optimistic_q() if self.Qbar is None else self.Qbar
        return float(np.asarray(d1) @ Q[0].max(-1))

    def observe_trajectory(self, traj):
        s, a = traj.states, traj.actions
        self.visits[np.arange(self.H), s, a] += 1
        for h in range(self.H - 1):
            self.counts[h, s[h], a[h], s[h + 1]] += 1


def optimistic_decomposition(mdp: TabularMDP, Qbar, policy) -> tuple[float, float]:
    """(V*_1 - V^pi_1, sum_h E^pi[(Qbar_h - T_h Qbar_{h+1})(s_h, a_h)]), both exact."""
    from .planning import value_iteration
    from ..envs.mdp import policy_value

    vf, _ = value_iteration(mdp)
    lhs = vf.value(mdp.d1) - policy_value(mdp, policy)
    Qbar = np.asarray(Qbar)
    d = occupancy(mdp, policy)
    rhs = sum(float(np.sum(d[h] * (Qbar[h] - bellman_backup(mdp, Qbar[h + 1], h)))) for h in range(mdp.H))
    return lhs, rhs


class EpsGreedyMDP(EpisodicLearner):
    """Greedy on the empirical model, uniform action with probability eps.

    Unvisited pairs carry no continuation value: filling them with uniform rows
    would hand the greedy step an optimism bonus it is not meant to have.
    """

    name = "eps_greedy_mdp"

    def __init__(self, S: int, A: int, H: int, R, eps: float = 0.1, d1=None):
        self.S, self.A, self.H = S, A, H
        self.R = np.asarray(R, dtype=float)
        self.eps = eps
        self.counts = np.zeros((H, S, A, S))

    def policy(self):
        n = self.counts.sum(-1, keepdims=True)
        P = self.counts / np.maximum(n, 1)
        Q = np.zeros((self.H + 1, self.S, self.A))
        for h in reversed(range(self.H)):
            Q[h] = self.R[h] + P[h] @ Q[h + 1].max(-1)
        pi = np.full((self.H, self.S, self.A), self.eps / self.A)
        g = greedy(Q[: self.H])
        np.put_along_axis(pi, g[..., None], 1 - self.eps + self.eps / self.A, axis=-1)
        return pi

    def observe_trajectory(self, traj):
        s, a = traj.states, traj.actions
        for h in range(self.H - 1):
            self.counts[h, s[h], a[h], s[h + 1]] += 1
