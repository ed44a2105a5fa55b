"""Finite-horizon tabular and low-rank MDPs with exact evaluators.

Layers are 0-based internally (h = 0..H-1). Policies are either deterministic
``(H, S)`` integer tables or stochastic ``(H, S, A)`` tables.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numprob import FiniteDist

CUMULATIVE = "cumulative"
ROW_TOL = 1e-9


@dataclass(frozen=True)
class TabularMDP:
    P: np.ndarray   # (H, S, A, S)
    R: np.ndarray   # (H, S, A) deterministic rewards
    d1: np.ndarray  # (S,)
    convention: str = CUMULATIVE

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        R = np.array(self.R, dtype=float)
        d1 = np.array(self.d1, dtype=float)
        if P.ndim != 4 or P.shape[1] != P.shape[3] or P.shape[:3] != R.shape or d1.shape != (P.shape[1],):
            raise ValueError("inconsistent MDP shapes")
        if np.any(P < -ROW_TOL) or np.any(np.abs(P.sum(-1) - 1) > ROW_TOL):
            raise ValueError("transition rows must be distributions")
        if np.any(d1 < 0) or abs(d1.sum() - 1) > ROW_TOL:
            raise ValueError("d1 must be a distribution")
        if np.any(R < -ROW_TOL):
            raise ValueError("rewards must be nonnegative")
        for a in (P, R, d1):
            a.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "d1", d1)

    @property
    def H(self) -> int:
        return self.P.shape[0]

    @property
    def S(self) -> int:
        return self.P.shape[1]

    @property
    def A(self) -> int:
        return self.P.shape[2]


def as_stochastic(policy, S: int, A: int, H: int) -> np.ndarray:
    pol = np.asarray(policy)
    if pol.shape == (H, S):
        if np.any(pol < 0) or np.any(pol >= A):
            raise IndexError("policy action out of range")
        out = np.zeros((H, S, A))
        np.put_along_axis(out, pol[..., None].astype(int), 1.0, axis=-1)
        return out
    if pol.shape == (H, S, A):
        pol = pol.astype(float)
        if np.any(pol < -ROW_TOL) or np.any(np.abs(pol.sum(-1) - 1) > 1e-8):
            raise ValueError("stochastic policy rows must be distributions")
        return pol
    raise ValueError(f"policy shape {pol.shape} incompatible with (H, S)=({H}, {S})")


def occupancy(mdp: TabularMDP, policy) -> np.ndarray:
    """State-action occupancies d[h, s, a] by forward recursion."""
    pi = as_stochastic(policy, mdp.S, mdp.A, mdp.H)
    d = np.zeros((mdp.H, mdp.S, mdp.A))
    ds = mdp.d1.copy()
    for h in range(mdp.H):
        d[h] = ds[:, None] * pi[h]
        ds = np.einsum("sa,sat->t", d[h], mdp.P[h])
    return d


def policy_value(mdp: TabularMDP, policy) -> float:
    return float(np.sum(occupancy(mdp, policy) * mdp.R))


def policy_q(mdp: TabularMDP, policy) -> tuple[np.ndarray, np.ndarray]:
    """Q^pi and V^pi tables, shaped (H+1, S, A) and (H+1, S) with zero terminal layer."""
    pi = as_stochastic(policy, mdp.S, mdp.A, mdp.H)
    Q = np.zeros((mdp.H + 1, mdp.S, mdp.A))
    V = np.zeros((mdp.H + 1, mdp.S))
    for h in reversed(range(mdp.H)):
        Q[h] = mdp.R[h] + mdp.P[h] @ V[h + 1]
        V[h] = np.sum(pi[h] * Q[h], axis=-1)
    return Q, V


@dataclass
class Trajectory:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    terminal: bool = True

    @property
    def ret(self) -> float:
        return float(self.rewards.sum())

    def tobytes(self) -> bytes:
        return self.states.tobytes() + self.actions.tobytes() + self.rewards.tobytes()


def _draw(probs: np.ndarray, rng: np.random.Generator) -> int:
    u = rng.random()
    return min(int(np.searchsorted(np.cumsum(probs), u, side="right")), probs.size - 1)


def rollout(mdp: TabularMDP, policy, rng: np.random.Generator) -> Trajectory:
    """One episode. Consumes exactly 2H + 1 uniforms from ``rng``."""
    pi = as_stochastic(policy, mdp.S, mdp.A, mdp.H)
    H = mdp.H
    states = np.zeros(H, dtype=np.int64)
    actions = np.zeros(H, dtype=np.int64)
    rewards = np.zeros(H)
    s = _draw(mdp.d1, rng)
    for h in range(H):
        a = _draw(pi[h, s], rng)
        states[h], actions[h], rewards[h] = s, a, mdp.R[h, s, a]
        s = _draw(mdp.P[h, s, a], rng)
    return Trajectory(states, actions, rewards)


def combination_lock(H: int, good=None) -> TabularMDP:
    """Chain of H states plus a dead state (index H) and a goal state (index H+1).

    At layer h the agent sits in chain state h; the good action advances, the
    other action falls into the absorbing dead state. Reward 1 is paid only for
    the good action at the last layer.
    """
    if H < 1:
        raise ValueError("H must be at least 1")
    good = np.ones(H, dtype=int) if good is None else np.asarray(good, dtype=int)
    if good.shape != (H,) or np.any((good < 0) | (good > 1)):
        raise ValueError("good must be a length-H vector of actions in {0, 1}")
    S, A = H + 2, 2
    dead, goal = H, H + 1
    P = np.zeros((H, S, A, S))
    R = np.zeros((H, S, A))
    P[:, :, :, dead] = 1.0
    P[:, goal, :, dead] = 0.0
    P[:, goal, :, goal] = 1.0
    for h in range(H):
        nxt = goal if h == H - 1 else h + 1
        P[h, h, good[h], dead] = 0.0
        P[h, h, good[h], nxt] = 1.0
    R[H - 1, H - 1, good[H - 1]] = 1.0
    d1 = np.zeros(S)
    d1[0] = 1.0
    return TabularMDP(P, R, d1)


def random_tabular_mdp(S: int, A: int, H: int, rng: np.random.Generator,
                       sparsity: float = 0.0) -> TabularMDP:
    """Dirichlet transitions and rewards in [0, 1/H] so any return lies in [0, 1]."""
    P = rng.dirichlet(np.ones(S), size=(H, S, A))
    if sparsity > 0:
        P = np.where(rng.random(P.shape) < sparsity, 0.0, P)
        P[..., 0] += (P.sum(-1) == 0)
        P /= P.sum(-1, keepdims=True)
    R = rng.random((H, S, A)) / H
    d1 = rng.dirichlet(np.ones(S))
    return TabularMDP(P, R, d1)


@dataclass(frozen=True)
class LowRankMDP:
    """P_h(s'|s,a) = <phi(s,a), mu_h(s')>, r_h(s,a) = <phi(s,a), w_h>."""

    phi: np.ndarray  # (S, A, d)
    mu: np.ndarray   # (H, d, S)
    w: np.ndarray    # (H, d)
    d1: np.ndarray   # (S,)

    def __post_init__(self):
        self.to_tabular()  # validates transition rows
        if np.any(np.linalg.norm(self.phi, axis=-1) > 1 + 1e-12):
            raise ValueError("feature norms must be at most 1")

    @property
    def d(self) -> int:
        return self.phi.shape[-1]

    @property
    def H(self) -> int:
        return self.mu.shape[0]

    @property
    def S(self) -> int:
        return self.phi.shape[0]

    @property
    def A(self) -> int:
        return self.phi.shape[1]

    def to_tabular(self) -> TabularMDP:
        P = np.einsum("sad,hdt->hsat", self.phi, self.mu)
        R = np.einsum("sad,hd->hsa", self.phi, self.w)
        return TabularMDP(np.clip(P, 0.0, None), R, self.d1)


def random_low_rank_mdp(S: int, A: int, H: int, d: int, rng: np.random.Generator,
                        concentration: float = 0.3) -> LowRankMDP:
    """Simplex features and distribution-valued latent rows: valid by construction."""
    phi = rng.dirichlet(np.full(d, concentration), size=(S, A))
    mu = rng.dirichlet(np.full(S, concentration), size=(H, d))
    w = rng.random((H, d)) / H
    d1 = rng.dirichlet(np.ones(S))
    return LowRankMDP(phi, mu, w, d1)
