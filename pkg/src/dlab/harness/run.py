"""Seeded execution of one experiment config."""
from __future__ import annotations

import numpy as np

from ..envs import ContextualEnv, StructuredEnv, env_from_spec, rollout
from ..numprob import make_rng, seed_offset
from ..rl import optimal_value
from .config import ConfigError, ExperimentConfig
from .ledger import RegretLedger, ledgers_to_csv, write_atomic
from .registry import as_tabular, env_kind, expected_policy_regret, get_algorithm


def _draw(p: np.ndarray, rng: np.random.Generator) -> int:
    return min(int(np.searchsorted(np.cumsum(p), rng.random(), side="right")), p.size - 1)


def run_seed(env, entry, params: dict, T: int, seed: int, key: str, env_name: str) -> RegretLedger:
    """One run. Environment draws and learner-internal draws use separate streams."""
    rng = make_rng(seed, key)
    algo_rng = make_rng(seed, key + "/algo")
    learner = entry.build(env, T, params, algo_rng)
    ledger = RegretLedger(seed, entry.name, env_name)
    kind = env_kind(env)
    if kind == "episodic":
        mdp = as_tabular(env)
        vstar = optimal_value(mdp)
        for _ in range(T):
            pi = learner.policy()
            inst = expected_policy_regret(mdp, vstar, learner, pi)
            traj = rollout(mdp, pi, rng)
            learner.observe_trajectory(traj)
            ledger.add(inst, traj.ret)
        return ledger
    bandit = env.bandit() if isinstance(env, StructuredEnv) else env
    for _ in range(T):
        if kind == "contextual":
            x = env.sample_context(rng)
            p = learner.act(x)
            inst = env.expected_regret(x, p)
            a = _draw(p, rng)
            r = env.pull(x, a, rng)
        else:
            x = None
            p = learner.act(None)
            inst = bandit.expected_regret(p)
            a = _draw(p, rng)
            r = bandit.pull(a, rng)
        learner.observe(x, a, r, p)
        ledger.add(inst, r)
    return ledger


def run_experiment(config: ExperimentConfig, write: bool = True) -> list[RegretLedger]:
    entry = get_algorithm(config.algo["name"])
    env = env_from_spec(config.env)
    kind = env_kind(env)
    if entry.kind not in (kind, "any"):
        raise ConfigError(f"algorithm {entry.name!r} runs on {entry.kind} environments, not {kind}")
    if config.convention is not None and getattr(env, "convention", config.convention) != config.convention:
        raise ConfigError(f"convention {config.convention!r} does not match the environment's {env.convention!r}")
    offset = seed_offset()
    ledgers = [run_seed(env, entry, config.algo["params"], config.T, s + offset, config.key, config.env["type"])
               for s in config.seeds]
    if write and config.out:
        write_atomic(config.out, ledgers_to_csv(ledgers))
    return ledgers
