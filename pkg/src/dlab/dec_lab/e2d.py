"""Generalized UCB and the Estimation-to-Decisions meta-algorithm on finite classes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bandits import Learner, point_mass
from ..estimators import LogLossPosterior, confidence_radius
from ..numprob import RewardDist
from .dec import DecProblem, dec_offset, divergence_table
from .strategies import cheating_dec_strategy


class GeneralizedUCB(Learner):
    """Optimism over a square-loss confidence set of a finite class ``fclass[k, pi]``."""

    name = "generalized_ucb"

    def __init__(self, fclass, beta: float | None = None, delta: float = 0.1):
        self.F = np.asarray(fclass, dtype=float)
        self.beta = confidence_radius(self.F.shape[0], delta) if beta is None else beta
        self.sq_loss = np.zeros(self.F.shape[0])
        self.chosen: list[int] = []

    def members(self) -> np.ndarray:
        return self.sq_loss <= self.sq_loss.min() + self.beta

    def act(self, context=None):
        upper = self.F[self.members()].max(axis=0)
        a = int(np.argmax(upper))
        self.chosen.append(a)
        return point_mass(self.F.shape[1], a)

    def observe(self, context, action, reward, p=None):
        self.sq_loss += (self.F[:, action] - reward) ** 2


@dataclass
class E2DRound:
    regret: float        # E_p[f*(best) - f*(pi)]
    est: float           # E_p[D(M*(pi), Mhat(pi))]
    certified: float     # max over the class of the DEC payoff at the played p
    gap: float


class E2D(Learner):
    """Estimation-to-Decisions with a log-loss posterior over a finite model class.

    The reference model is the posterior-mean model (``ref="mean"``) or the MAP
    member (``ref="map"``). The exploration distribution comes from the exact
    DEC solver, or from the closed-form cheating-code strategy when
    ``strategy="cheating"``. Rounds are recorded for the bookkeeping audit.
    """

    name = "e2d"

    def __init__(self, model_means, gamma: float, noise: str = "gaussian", divergence: str = "sq",
                 ref: str = "mean", strategy: str = "dec", cheat_A: int | None = None,
                 true_index: int | None = None, tol: float = 1e-6):
        self.M = np.asarray(model_means, dtype=float)
        self.gamma = float(gamma)
        self.noise = noise
        self.divergence = divergence
        self.ref = ref
        self.strategy = strategy
        self.cheat_A = cheat_A
        self.true_index = true_index
        self.tol = tol
        self.post = LogLossPosterior(self.M.shape[0])
        self.rounds: list[E2DRound] = []
        self._p = None
        self._ref = None

    def reference(self) -> np.ndarray:
        q = self.post.dist().probs
        if self.ref == "map":
            return self.M[int(np.argmax(q))]
        return q @ self.M

    def act(self, context=None):
        fhat = self.reference()
        prob = DecProblem(self.M, fhat, self.gamma, self.divergence)
        if self.strategy == "cheating":
            p = cheating_dec_strategy(fhat, self.gamma, self.cheat_A).p
            certified, gap = float((prob.payoff_table() @ p).max()), 0.0
        else:
            cert = dec_offset(prob, tol=self.tol)
            p, certified, gap = cert.p, cert.upper, cert.gap
        self._p, self._ref = p, fhat
        if self.true_index is not None:
            fstar = self.M[self.true_index]
            reg = float(fstar.max() - p @ fstar)
            est = float(p @ divergence_table(fstar, fhat, self.divergence)[0])
            self.rounds.append(E2DRound(reg, est, certified, gap))
        return p

    def observe(self, context, action, reward, p=None):
        ld = np.array([RewardDist(self.noise, m).log_density(reward) for m in self.M[:, action]])
        self.post.update(ld)

    def bookkeeping(self) -> tuple[float, float]:
        """(sum of expected regret, sum of certified DEC values + gamma * Est)."""
        reg = math.fsum(r.regret for r in self.rounds)
        bound = math.fsum(r.certified for r in self.rounds) + self.gamma * math.fsum(r.est for r in self.rounds)
        return reg, bound


def e2d_run(model_means, true_index: int, gamma: float, T: int, rng, **kwargs):
    """Run E2D against model ``true_index`` of the class; returns the learner with its audit."""
    from ..envs import bandit_from_means

    noise = kwargs.get("noise", "gaussian")
    env = bandit_from_means(np.asarray(model_means)[true_index], noise)
    agent = E2D(model_means, gamma, true_index=true_index, **kwargs)
    for _ in range(T):
        p = agent.act()
        a = int(min(np.searchsorted(np.cumsum(p), rng.random(), side="right"), p.size - 1))
        agent.observe(None, a, env.pull(a, rng), p)
    return agent
