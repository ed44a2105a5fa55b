"""JSON round-tripping for environment specs.

A spec is either a generator recipe (``{"type": "combination_lock", "H": 8}``)
or an explicit table (``{"type": "tabular", "P": ..., "R": ..., "d1": ...}``).
"""
from __future__ import annotations

import numpy as np

from ..numprob import FiniteDist, make_rng
from .bandit import (BanditEnv, ContextualEnv, StructuredEnv, bandit_from_means,
                     cheating_code, linear_contextual)
from .mdp import LowRankMDP, TabularMDP, combination_lock, random_low_rank_mdp, random_tabular_mdp


def env_from_spec(spec: dict):
    kind = spec.get("type")
    if kind == "bandit":
        return bandit_from_means(spec["means"], spec.get("noise", "gaussian"))
    if kind == "contextual":
        probs = spec.get("context_probs")
        means = np.asarray(spec["means"], dtype=float)
        ctx = FiniteDist(probs) if probs is not None else FiniteDist.uniform(means.shape[0])
        return ContextualEnv(ctx, means, spec.get("noise", "gaussian"))
    if kind == "linear_contextual":
        return linear_contextual(spec["features"], spec["theta"], noise=spec.get("noise", "gaussian"))
    if kind == "structured":
        feats = spec.get("features")
        return StructuredEnv(np.asarray(spec["fclass"], dtype=float), int(spec.get("true_index", 0)),
                             spec.get("noise", "gaussian"),
                             None if feats is None else np.asarray(feats, dtype=float))
    if kind == "cheating_code":
        _, env = cheating_code(int(spec["A"]), spec.get("noise", "gaussian"))
        return env.with_truth(int(spec.get("true_index", 0)))
    if kind == "combination_lock":
        return combination_lock(int(spec["H"]), spec.get("good"))
    if kind == "tabular":
        return TabularMDP(np.asarray(spec["P"]), np.asarray(spec["R"]), np.asarray(spec["d1"]))
    if kind == "random_tabular":
        rng = make_rng(int(spec.get("seed", 0)), "env:random_tabular")
        return random_tabular_mdp(int(spec["S"]), int(spec["A"]), int(spec["H"]), rng)
    if kind == "low_rank":
        return LowRankMDP(*(np.asarray(spec[k], dtype=float) for k in ("phi", "mu", "w", "d1")))
    if kind == "random_low_rank":
        rng = make_rng(int(spec.get("seed", 0)), "env:random_low_rank")
        return random_low_rank_mdp(int(spec["S"]), int(spec["A"]), int(spec["H"]), int(spec["d"]), rng)
    raise ValueError(f"unknown env type {kind!r}; known: {sorted(ENV_TYPES)}")


ENV_TYPES = {"bandit", "contextual", "linear_contextual", "structured", "cheating_code",
             "combination_lock", "tabular", "random_tabular", "low_rank", "random_low_rank"}


def env_to_spec(env) -> dict:
    """Explicit-table spec; ``env_from_spec(env_to_spec(e))`` rebuilds an equal env."""
    if isinstance(env, BanditEnv):
        kinds = {a.kind for a in env.arms}
        if len(kinds) != 1:
            raise ValueError("mixed reward kinds are not serializable")
        return {"type": "bandit", "means": env.means.tolist(), "noise": kinds.pop()}
    if isinstance(env, ContextualEnv):
        return {"type": "contextual", "context_probs": env.context_dist.probs.tolist(),
                "means": env.means.tolist(), "noise": env.noise}
    if isinstance(env, StructuredEnv):
        out = {"type": "structured", "fclass": env.fclass.tolist(),
               "true_index": env.true_index, "noise": env.noise}
        if env.features is not None:
            out["features"] = np.asarray(env.features).tolist()
        return out
    if isinstance(env, TabularMDP):
        return {"type": "tabular", "P": env.P.tolist(), "R": env.R.tolist(), "d1": env.d1.tolist()}
    if isinstance(env, LowRankMDP):
        return {"type": "low_rank", "phi": env.phi.tolist(), "mu": env.mu.tolist(),
                "w": env.w.tolist(), "d1": env.d1.tolist()}
    raise TypeError(f"cannot serialize {type(env).__name__}")
