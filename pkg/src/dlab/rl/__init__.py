from .bellman_rank import RANK_TOL, BellmanFactorization, bellman_rank, residual_matrices
from .bilin import (
    BilinReport, EmptyConfidenceSet, batch_rollouts, bilin_beta, bilinucb_run, greedy_policy,
    linear_q_class, residual_estimates,
)
from .episodes import EpisodeLedger, run_episodes
from .identities import (
    IdentityRow, bellman_residual_greedy, bellman_residual_models, identity_checks,
    performance_difference, simulation_bound, simulation_identity,
)
from .lsvi import LSVIUCB, ball_least_squares, lsvi_radius
from .pcigw import (
    PcIgwResult, cover_policy, dec_payoff, pcigw_distribution, pcigw_eta, policy_from_occupancy,
    ratio_objective,
)
from .planning import (
    ValueFunctions, bellman_backup, bellman_residuals, greedy, optimal_value,
    trajectory_hellinger_sq, value_iteration,
)
from .ucbvi import UCBVI, EpisodicLearner, EpsGreedyMDP, optimistic_decomposition

__all__ = [
    "RANK_TOL", "BellmanFactorization", "bellman_rank", "residual_matrices",
    "BilinReport", "EmptyConfidenceSet", "batch_rollouts", "bilin_beta", "bilinucb_run",
    "greedy_policy", "linear_q_class", "residual_estimates",
    "EpisodeLedger", "run_episodes",
    "IdentityRow", "bellman_residual_greedy", "bellman_residual_models", "identity_checks",
    "performance_difference", "simulation_bound", "simulation_identity",
    "LSVIUCB", "ball_least_squares", "lsvi_radius",
    "PcIgwResult", "cover_policy", "dec_payoff", "pcigw_distribution", "pcigw_eta",
    "policy_from_occupancy", "ratio_objective",
    "ValueFunctions", "bellman_backup", "bellman_residuals", "greedy", "optimal_value",
    "trajectory_hellinger_sq", "value_iteration",
    "UCBVI", "EpisodicLearner", "EpsGreedyMDP", "optimistic_decomposition",
]
