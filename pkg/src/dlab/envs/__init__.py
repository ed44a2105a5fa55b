from .bandit import (
    BanditEnv, ContextualEnv, StructuredEnv, bandit_from_means, bernoulli_bandit, cheat_bits,
    cheating_code, decode_cheat, gaussian_bandit, linear_contextual, linear_structured,
    random_contextual,
)
from .mdp import (
    LowRankMDP, TabularMDP, Trajectory, as_stochastic, combination_lock, occupancy,
    policy_q, policy_value, random_low_rank_mdp, random_tabular_mdp, rollout,
)
from .serialize import ENV_TYPES, env_from_spec, env_to_spec

__all__ = [
    "BanditEnv", "ContextualEnv", "StructuredEnv", "bandit_from_means", "bernoulli_bandit",
    "cheat_bits", "cheating_code", "decode_cheat", "gaussian_bandit", "linear_contextual",
    "linear_structured", "random_contextual",
    "LowRankMDP", "TabularMDP", "Trajectory", "as_stochastic", "combination_lock", "occupancy",
    "policy_q", "policy_value", "random_low_rank_mdp", "random_tabular_mdp", "rollout",
    "ENV_TYPES", "env_from_spec", "env_to_spec",
]
