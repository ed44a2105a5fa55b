"""Multi-armed bandit algorithms.

Each learner is a round-based state machine: ``act(context)`` returns the
decision distribution for the round and ``observe(context, action, reward)``
updates the state. Distributions are plain numpy vectors summing to 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimators import ExpWeightsState, LogLossPosterior, exp_weights_update
from .numprob import RewardDist

MIN_PROB = 1e-12


class Learner:
    """Shared interface consumed by the harness."""

    name = "learner"

    def act(self, context=None) -> np.ndarray:
        raise NotImplementedError

    def observe(self, context, action: int, reward: float, p=None) -> None:
        raise NotImplementedError


def point_mass(n: int, i: int) -> np.ndarray:
    p = np.zeros(n)
    p[i] = 1.0
    return p


@dataclass
class ArmStats:
    counts: np.ndarray
    sums: np.ndarray

    @classmethod
    def zeros(cls, A: int) -> "ArmStats":
        return cls(np.zeros(A, dtype=np.int64), np.zeros(A))

    @property
    def means(self) -> np.ndarray:
        # unpulled arms read as 0
        return np.divide(self.sums, self.counts, out=np.zeros_like(self.sums), where=self.counts > 0)

    def update(self, a: int, r: float) -> None:
        self.counts[a] += 1
        self.sums[a] += r


def eps_greedy_act(stats: ArmStats, eps: float, A: int) -> np.ndarray:
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    return (1 - eps) * point_mass(A, int(np.argmax(stats.means))) + eps / A


def eps_greedy_schedule(A: int, T: int, delta: float) -> float:
    return min(1.0, (A * math.log(A * T / delta) / T) ** (1 / 3))


def ucb_bonus(n, T: int, A: int, delta: float) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(n > 0, np.sqrt(2 * math.log(2 * T * T * A / delta) / np.maximum(n, 1)), np.inf)


def ucb_bounds(stats: ArmStats, T: int, A: int, delta: float) -> tuple[np.ndarray, np.ndarray]:
    b = ucb_bonus(stats.counts, T, A, delta)
    return stats.means - b, stats.means + b


def ucb_act(stats: ArmStats, T: int, A: int, delta: float) -> np.ndarray:
    _, upper = ucb_bounds(stats, T, A, delta)
    return point_mass(A, int(np.argmax(upper)))


def etc_act(stats: ArmStats, N: int, A: int, t: int) -> np.ndarray:
    """Round-robin through round N (1-based t), then commit to the empirical best."""
    if N % A:
        raise ValueError("commit horizon must be a multiple of A")
    if t <= N:
        return point_mass(A, (t - 1) % A)
    return point_mass(A, int(np.argmax(stats.means)))


def posterior_sampling_act(posterior, model_means) -> np.ndarray:
    """Probability that each decision is optimal under the posterior, computed exactly."""
    M = np.asarray(model_means, dtype=float)
    q = np.asarray(posterior, dtype=float)
    p = np.zeros(M.shape[1])
    np.add.at(p, np.argmax(M, axis=1), q)
    return p


def exp3_act(state: ExpWeightsState) -> np.ndarray:
    return state.dist().probs.copy()


def exp3_loss_estimate(A: int, arm: int, loss: float, p) -> np.ndarray:
    pa = float(np.asarray(p)[arm])
    if pa < MIN_PROB:
        raise ValueError(f"played arm has probability {pa}; state is corrupted")
    est = np.zeros(A)
    est[arm] = loss / pa
    return est


def exp3_observe(state: ExpWeightsState, arm: int, loss: float, p) -> ExpWeightsState:
    return exp_weights_update(state, exp3_loss_estimate(len(state), arm, loss, p))


def exp3_eta(A: int, T: int) -> float:
    return math.sqrt(math.log(A) / (A * T))


# ---------------------------------------------------------------- learners

class EpsGreedy(Learner):
    name = "eps_greedy"

    def __init__(self, A: int, T: int, delta: float = 0.1, eps: float | None = None):
        self.A = A
        self.eps = eps_greedy_schedule(A, T, delta) if eps is None else float(eps)
        self.stats = ArmStats.zeros(A)

    def act(self, context=None):
        return eps_greedy_act(self.stats, self.eps, self.A)

    def observe(self, context, action, reward, p=None):
        self.stats.update(action, reward)


class ExploreThenCommit(Learner):
    name = "etc"

    def __init__(self, A: int, N: int):
        self.A, self.N = A, N
        self.t = 0
        self.stats = ArmStats.zeros(A)
        self.committed: int | None = None

    def act(self, context=None):
        p = etc_act(self.stats, self.N, self.A, self.t + 1)
        if self.t + 1 > self.N and self.committed is None:
            self.committed = int(np.argmax(p))
        return point_mass(self.A, self.committed) if self.committed is not None else p

    def observe(self, context, action, reward, p=None):
        self.t += 1
        if self.t <= self.N:
            self.stats.update(action, reward)


class UCB(Learner):
    name = "ucb"

    def __init__(self, A: int, T: int, delta: float = 0.1):
        self.A, self.T, self.delta = A, T, delta
        self.stats = ArmStats.zeros(A)
        self.width_terms: list[float] = []  # min(1, 1/sqrt(n)) at each pull, for the potential check

    def bounds(self):
        return ucb_bounds(self.stats, self.T, self.A, self.delta)

    def act(self, context=None):
        return ucb_act(self.stats, self.T, self.A, self.delta)

    def observe(self, context, action, reward, p=None):
        n = self.stats.counts[action]
        self.width_terms.append(1.0 if n == 0 else min(1.0, 1.0 / math.sqrt(n)))
        self.stats.update(action, reward)


class PosteriorSampling(Learner):
    """Exact posterior over a finite model class given as a mean table ``(K, A)``."""

    name = "posterior_sampling"

    def __init__(self, model_means, noise: str = "gaussian", prior=None):
        self.M = np.asarray(model_means, dtype=float)
        self.noise = noise
        self.post = LogLossPosterior(self.M.shape[0], prior)

    def act(self, context=None):
        return posterior_sampling_act(self.post.dist().probs, self.M)

    def observe(self, context, action, reward, p=None):
        ld = np.array([RewardDist(self.noise, m).log_density(reward) for m in self.M[:, action]])
        self.post.update(ld)


class Exp3(Learner):
    """Exponential weights on importance-weighted losses ``1 - reward``."""

    name = "exp3"

    def __init__(self, A: int, T: int, eta: float | None = None):
        self.A = A
        self.state = ExpWeightsState.init(A, exp3_eta(A, T) if eta is None else eta)

    def act(self, context=None):
        return exp3_act(self.state)

    def observe(self, context, action, reward, p=None):
        p = exp3_act(self.state) if p is None else p
        self.state = exp3_observe(self.state, action, 1.0 - reward, p)


def exp3_expected_regret(loss_table, eta: float) -> float:
    """Exact expected regret of Exp3 on a fixed ``(T, A)`` loss table by full-tree recursion.

    Cost is A^T, so keep T small.
    """
    L = np.asarray(loss_table, dtype=float)
    T, A = L.shape
    best = float(L.sum(axis=0).min())

    def rec(t, logw):
        if t == T:
            return 0.0
        w = np.exp(logw - logw.max())
        p = w / w.sum()
        total = 0.0
        for a in range(A):
            if p[a] < MIN_PROB:
                continue
            nxt = logw.copy()
            nxt[a] -= eta * L[t, a] / p[a]
            total += p[a] * (L[t, a] + rec(t + 1, nxt))
        return total

    return rec(0, np.zeros(A)) - best
