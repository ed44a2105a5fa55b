from .distributions import (
    FiniteDist,
    RewardDist,
    bernoulli,
    divergence,
    gaussian,
    hellinger_sq,
    hellinger_sq_gaussian,
    kl,
    kl_hellinger_ratio_bound,
    point,
    tv,
)
from .design import DesignResult, g_optimal_design, leverages
from .lp import LpProblem, LpResult, LpStatus, solve_lp, vertex_enumeration
from .rng import make_rng, seed_offset, substream

__all__ = [
    "FiniteDist", "RewardDist", "bernoulli", "divergence", "gaussian", "hellinger_sq",
    "hellinger_sq_gaussian", "kl", "kl_hellinger_ratio_bound", "point", "tv",
    "DesignResult", "g_optimal_design", "leverages",
    "LpProblem", "LpResult", "LpStatus", "solve_lp", "vertex_enumeration",
    "make_rng", "seed_offset", "substream",
]
