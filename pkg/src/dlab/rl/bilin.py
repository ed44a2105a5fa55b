"""Average-optimistic elimination over a finite Q class (PAC, batched episodes)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..envs.mdp import LowRankMDP, TabularMDP
from .planning import value_iteration


class EmptyConfidenceSet(RuntimeError):
    """Every member was eliminated; the radius is too small for the data."""


def greedy_policy(Q) -> np.ndarray:
    return np.argmax(np.asarray(Q), axis=-1)


def batch_rollouts(mdp: TabularMDP, policy, n: int, rng: np.random.Generator):
    """n episodes of a deterministic policy at once; returns states (n, H+1), actions, rewards (n, H)."""
    H = mdp.H
    states = np.zeros((n, H + 1), dtype=np.int64)
    actions = np.zeros((n, H), dtype=np.int64)
    rewards = np.zeros((n, H))
    states[:, 0] = _sample_rows(np.broadcast_to(mdp.d1, (n, mdp.S)), rng)
    for h in range(H):
        s = states[:, h]
        a = policy[h, s]
        actions[:, h], rewards[:, h] = a, mdp.R[h, s, a]
        states[:, h + 1] = _sample_rows(mdp.P[h, s, a], rng)
    return states, actions, rewards


def _sample_rows(probs: np.ndarray, rng) -> np.ndarray:
    u = rng.random(probs.shape[0])[:, None]
    return np.minimum((np.cumsum(probs, axis=1) <= u).sum(axis=1), probs.shape[1] - 1)


def residual_estimates(Qs: np.ndarray, states, actions, rewards) -> np.ndarray:
    """Empirical Bellman residuals, shape (|Q|, H); ``Qs`` is (|Q|, H+1, S, A) with a zero last layer."""
    K, H = Qs.shape[0], actions.shape[1]
    out = np.zeros((K, H))
    for h in range(H):
        cur = Qs[:, h, states[:, h], actions[:, h]]
        nxt = Qs[:, h + 1].max(-1)[:, states[:, h + 1]]
        out[:, h] = (cur - rewards[:, h] - nxt).mean(axis=1)
    return out


def bilin_beta(K: int, n: int, n_class: int, H: int, delta: float, c: float = 1.0) -> float:
    return c * K * (math.log(n_class) + math.log(H * K / delta)) / n


@dataclass
class BilinReport:
    policy: np.ndarray
    chosen: list = field(default_factory=list)        # class index per iteration
    surviving: list = field(default_factory=list)     # surviving-set sizes after each iteration
    truth_kept: list = field(default_factory=list)    # whether ``truth_index`` survived each iteration
    values: list = field(default_factory=list)        # V-hat per iteration


def bilinucb_run(mdp: TabularMDP, Qs, K: int, n: int, beta: float, rng: np.random.Generator,
                 truth_index: int | None = None) -> BilinReport:
    Qs = np.asarray(Qs, dtype=float)
    alive = np.ones(Qs.shape[0], dtype=bool)
    sq = np.zeros((Qs.shape[0], mdp.H))
    report = BilinReport(policy=None)
    policies = []
    for _ in range(K):
        idx = np.flatnonzero(alive)
        opt = [mdp.d1 @ Qs[k, 0].max(-1) for k in idx]
        k = int(idx[int(np.argmax(opt))])
        pi = greedy_policy(Qs[k, : mdp.H])
        states, actions, rewards = batch_rollouts(mdp, pi, n, rng)
        sq += residual_estimates(Qs, states, actions, rewards) ** 2
        alive = np.all(sq <= beta, axis=1)
        report.chosen.append(k)
        report.surviving.append(int(alive.sum()))
        if truth_index is not None:
            report.truth_kept.append(bool(alive[truth_index]))
        report.values.append(float(rewards.sum(axis=1).mean()))
        policies.append(pi)
        if not alive.any():
            raise EmptyConfidenceSet("all value functions eliminated; increase beta")
    report.policy = policies[int(np.argmax(report.values))]
    return report


def linear_q_class(model: LowRankMDP, size: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    """Q* (index 0) followed by ``size - 1`` linear perturbations phi . (theta*_h + noise)."""
    tab = model.to_tabular()
    vf, _ = value_iteration(tab)
    H, S, A, d = model.H, model.S, model.A, model.d
    theta = np.stack([model.w[h] + model.mu[h] @ vf.V[h + 1] for h in range(H)])
    out = np.zeros((size, H + 1, S, A))
    for k in range(size):
        th = theta if k == 0 else theta + scale * rng.uniform(-1, 1, size=theta.shape)
        out[k, :H] = np.einsum("sad,hd->hsa", model.phi, th)
    return out
