"""Algorithm registry: name -> factory building a learner for an environment."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import bandits, contextual
from ..dec_lab import E2D, GeneralizedUCB
from ..envs import BanditEnv, ContextualEnv, LowRankMDP, StructuredEnv, TabularMDP, policy_value
from ..estimators import LayerwiseEstimator
from ..rl import LSVIUCB, UCBVI, EpisodicLearner, EpsGreedyMDP, pcigw_distribution, value_iteration


class UnknownAlgorithm(KeyError):
    pass


@dataclass
class AlgoEntry:
    name: str
    kind: str               # "bandit", "contextual" or "episodic"
    build: Callable         # (env, T, params, rng) -> learner


REGISTRY: dict[str, AlgoEntry] = {}


def register(name: str, kind: str):
    def deco(fn):
        REGISTRY[name] = AlgoEntry(name, kind, fn)
        return fn
    return deco


def get_algorithm(name: str) -> AlgoEntry:
    if name not in REGISTRY:
        raise UnknownAlgorithm(f"unknown algorithm {name!r}; registered: {sorted(REGISTRY)}")
    return REGISTRY[name]


def env_kind(env) -> str:
    if isinstance(env, (BanditEnv, StructuredEnv)):
        return "bandit"
    if isinstance(env, ContextualEnv):
        return "contextual"
    if isinstance(env, (TabularMDP, LowRankMDP)):
        return "episodic"
    raise TypeError(f"unsupported environment {type(env).__name__}")


def _arms(env) -> int:
    return env.n_decisions if isinstance(env, StructuredEnv) else env.n_arms


def _class_of(env, params) -> np.ndarray:
    if "fclass" in params:
        return np.asarray(params["fclass"], dtype=float)
    if isinstance(env, StructuredEnv):
        return env.fclass
    raise ValueError("this algorithm needs a finite class: pass params.fclass or use a structured env")


# ---------------------------------------------------------------- bandits

class OptimalArm(bandits.Learner):
    name = "optimal"

    def __init__(self, best):
        self.best = best  # callable context -> optimal action

    def act(self, context=None):
        p = np.zeros(self.best.n)
        p[self.best(context)] = 1.0
        return p

    def observe(self, context, action, reward, p=None):
        pass


class _Best:
    def __init__(self, env):
        self.env = env
        self.n = env.n_actions if isinstance(env, ContextualEnv) else _arms(env)

    def __call__(self, context):
        if isinstance(self.env, ContextualEnv):
            return self.env.optimal_action(context)
        means = self.env.means if isinstance(self.env, StructuredEnv) else self.env.means
        return int(np.argmax(means))


@register("eps_greedy", "bandit")
def _eps_greedy(env, T, params, rng):
    return bandits.EpsGreedy(_arms(env), T, params.get("delta", 0.1), params.get("eps"))


@register("etc", "bandit")
def _etc(env, T, params, rng):
    return bandits.ExploreThenCommit(_arms(env), int(params["N"]))


@register("ucb", "bandit")
def _ucb(env, T, params, rng):
    return bandits.UCB(_arms(env), T, params.get("delta", 0.1))


@register("exp3", "bandit")
def _exp3(env, T, params, rng):
    return bandits.Exp3(_arms(env), T, params.get("eta"))


@register("posterior_sampling", "bandit")
def _ps(env, T, params, rng):
    return bandits.PosteriorSampling(_class_of(env, params), params.get("noise", "gaussian"))


@register("generalized_ucb", "bandit")
def _gucb(env, T, params, rng):
    return GeneralizedUCB(_class_of(env, params), params.get("beta"), params.get("delta", 0.1))


@register("e2d", "bandit")
def _e2d(env, T, params, rng):
    kw = {k: params[k] for k in ("noise", "divergence", "ref", "strategy", "cheat_A", "tol") if k in params}
    return E2D(_class_of(env, params), float(params.get("gamma", 10.0)), **kw)


@register("optimal", "any")
def _optimal(env, T, params, rng):
    if env_kind(env) == "episodic":
        return OptimalPolicy(env)
    return OptimalArm(_Best(env))


# ---------------------------------------------------------------- contextual

def _context_class(env: ContextualEnv, params, rng) -> np.ndarray:
    """Explicit ``fclass`` or the truth plus ``class_size - 1`` random tables, truth at index 0."""
    if "fclass" in params:
        return np.asarray(params["fclass"], dtype=float)
    size = int(params.get("class_size", 16))
    others = rng.random((size - 1,) + env.means.shape)
    return np.concatenate([env.means[None], others])


@register("squarecb", "contextual")
def _squarecb(env, T, params, rng):
    return contextual.SquareCB(_context_class(env, params, rng), T, params.get("delta", 0.1), params.get("gamma"))


@register("eps_greedy_cb", "contextual")
def _egcb(env, T, params, rng):
    return contextual.EpsGreedyCB(_context_class(env, params, rng), T, params.get("delta", 0.1), params.get("eps"))


@register("epoch_squarecb", "contextual")
def _epoch(env, T, params, rng):
    return contextual.EpochSquareCB(_context_class(env, params, rng), T, params.get("delta", 0.1))


@register("linucb", "contextual")
def _linucb(env, T, params, rng):
    if env.features is None:
        raise ValueError("linucb needs an environment with features")
    return contextual.LinUCB(env.features, params.get("beta"), params.get("thetas"), params.get("delta", 0.1))


# ---------------------------------------------------------------- episodic

def as_tabular(env) -> TabularMDP:
    return env.to_tabular() if isinstance(env, LowRankMDP) else env


class OptimalPolicy(EpisodicLearner):
    name = "optimal"

    def __init__(self, env):
        self.pi = value_iteration(as_tabular(env))[1]

    def policy(self):
        return self.pi

    def observe_trajectory(self, traj):
        pass


class PcIgwLearner(EpisodicLearner):
    """Estimation-to-decisions for tabular MDPs: frequency estimator plus the policy-cover IGW strategy."""

    name = "pcigw"

    def __init__(self, env: TabularMDP, gamma: float, rng: np.random.Generator):
        self.est = LayerwiseEstimator(env.S, env.A, env.H, env.R, env.d1)
        self.gamma = gamma
        self.rng = rng
        self.last = None

    def policy_mixture(self):
        self.last = pcigw_distribution(self.est.estimate(), self.gamma)
        return self.last.probs, self.last.policies

    def policy(self):
        probs, policies = self.policy_mixture()
        i = min(int(np.searchsorted(np.cumsum(probs), self.rng.random(), side="right")), len(probs) - 1)
        return policies[i]

    def observe_trajectory(self, traj):
        self.est.update(traj)


@register("ucbvi", "episodic")
def _ucbvi(env, T, params, rng):
    m = as_tabular(env)
    return UCBVI(m.S, m.A, m.H, m.R, T, params.get("delta", 0.1), m.d1, params.get("bonus_scale", 1.0))


@register("eps_greedy_mdp", "episodic")
def _egmdp(env, T, params, rng):
    m = as_tabular(env)
    return EpsGreedyMDP(m.S, m.A, m.H, m.R, params.get("eps", 0.1), m.d1)


@register("lsvi_ucb", "episodic")
def _lsvi(env, T, params, rng):
    if not isinstance(env, LowRankMDP):
        raise ValueError("lsvi_ucb needs a low-rank environment (known features)")
    return LSVIUCB(env.phi, env.H, T, params.get("delta", 0.1), params.get("c", 1.0))


@register("pcigw", "episodic")
def _pcigw(env, T, params, rng):
    return PcIgwLearner(as_tabular(env), float(params.get("gamma", 10.0)), rng)


def expected_policy_regret(mdp: TabularMDP, vstar: float, learner, pi) -> float:
    """Exact regret of the policy played, averaged over the learner's mixture when it has one."""
    last = getattr(learner, "last", None)
    if last is not None and hasattr(last, "probs"):
        return float(sum(q * (vstar - policy_value(mdp, p)) for q, p in zip(last.probs, last.policies)))
    return vstar - policy_value(mdp, pi)
