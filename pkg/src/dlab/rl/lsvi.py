"""Least-squares value iteration with elliptic bonuses for low-rank MDPs."""
from __future__ import annotations

import math

import numpy as np

from ..envs.mdp import LowRankMDP
from .ucbvi import EpisodicLearner


def ball_least_squares(gram: np.ndarray, target: np.ndarray, radius: float, iters: int = 200) -> np.ndarray:
    """argmin over ||theta|| <= radius of theta' G theta - 2 b' theta, i.e. least squares in the ball."""
    vals, vecs = np.linalg.eigh(gram)
    c = vecs.T @ target
    keep = vals > 1e-10 * max(1.0, vals.max(initial=0.0))
    free = np.where(keep, c / np.where(keep, vals, 1.0), 0.0)
    if np.linalg.norm(free) <= radius:
        return vecs @ free
    lo, hi = 0.0, np.linalg.norm(target) / radius
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.linalg.norm(c / (vals + mid)) > radius:
            lo = mid
        else:
            hi = mid
    return vecs @ (c / (vals + hi))


def lsvi_radius(d: int, H: int, T: int, delta: float, c: float = 1.0) -> float:
    return c * d ** 2 * math.log(H * T / delta)


class LSVIUCB(EpisodicLearner):
    """Features ``phi (S, A, d)`` are known; states are enumerable so Q-bar is kept as a table."""

    name = "lsvi_ucb"

    def __init__(self, phi, H: int, T: int, delta: float = 0.1, c: float = 1.0, audit_model: LowRankMDP | None = None):
        self.phi = np.asarray(phi, dtype=float)
        self.S, self.A, self.d = self.phi.shape
        self.H, self.T = H, T
        self.R = lsvi_radius(self.d, H, T, delta, c)
        self.rho = 2 * math.sqrt(self.d)
        self.sigma = np.stack([np.eye(self.d) for _ in range(H)])
        self.n = 0
        self.obs_s = np.zeros((H, max(T, 1)), dtype=np.int64)
        self.obs_a = np.zeros((H, max(T, 1)), dtype=np.int64)
        self.obs_r = np.zeros((H, max(T, 1)))
        self.potential = np.zeros(H)                # sum of ||phi_t||^2 in the pre-update inverse
        self.audit_model = audit_model
        self.confidence_ok = True
        self.Qbar = None

    def optimistic_q(self) -> np.ndarray:
        H, S, A, d = self.H, self.S, self.A, self.d
        Q = np.zeros((H + 1, S, A))
        flat = self.phi.reshape(-1, d)
        for h in reversed(range(H)):
            gram = self.sigma[h] - np.eye(d)
            n = self.n
            if n:
                X = self.phi[self.obs_s[h, :n], self.obs_a[h, :n]]
                y = self.obs_r[h, :n]
                if h + 1 < H:
                    y = y + Q[h + 1].max(-1)[self.obs_s[h + 1, :n]]
                theta = ball_least_squares(gram, X.T @ y, self.rho)
            else:
                theta = np.zeros(d)
            inv = np.linalg.inv(self.sigma[h])
            width = np.sqrt(np.maximum(np.einsum("nd,de,ne->n", flat, inv, flat), 0.0))
            Q[h] = np.minimum(flat @ theta + math.sqrt(self.R) * width, 1.0).reshape(S, A)
            if self.audit_model is not None:
                m = self.audit_model
                target = m.w[h] + m.mu[h] @ Q[h + 1].max(-1)
                err = theta - target
                if err @ self.sigma[h] @ err > self.R:
                    self.confidence_ok = False
        return Q

    def policy(self):
        self.Qbar = self.optimistic_q()
        return np.argmax(self.Qbar[: self.H], axis=-1)

    def optimistic_value(self, d1) -> float:
        Q = self.optimistic_q() if self.Qbar is None else self.Qbar
        return float(np.asarray(d1) @ Q[0].max(-1))

    def observe_trajectory(self, traj):
        s, a, r = traj.states, traj.actions, traj.rewards
        for h in range(self.H):
            f = self.phi[s[h], a[h]]
            self.potential[h] += f @ np.linalg.solve(self.sigma[h], f)
            self.sigma[h] += np.outer(f, f)
        if self.n == self.obs_s.shape[1]:
            grow = lambda x: np.concatenate([x, np.zeros_like(x)], axis=1)
            self.obs_s, self.obs_a, self.obs_r = grow(self.obs_s), grow(self.obs_a), grow(self.obs_r)
        self.obs_s[:, self.n], self.obs_a[:, self.n], self.obs_r[:, self.n] = s, a, r
        self.n += 1

    def potential_bound(self, T: int) -> float:
        return 2 * self.d * math.log(1 + T / self.d)
