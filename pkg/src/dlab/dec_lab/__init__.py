from .dec import (
    DecProblem, GridDecProblem, SaddleCertificate, dec_constrained, dec_offset,
    divergence_table, grid_oracle, simplex_grid,
)
from .e2d import E2D, E2DRound, GeneralizedUCB, e2d_run
from .eluder import EluderResult, eluder_dimension
from .strategies import (
    CheatingStrategy, LinearStrategy, LipschitzStrategy, cheating_dec_strategy, greedy_cover,
    igw_dec_strategy, igw_equalizer_terms, linear_dec_strategy, lipschitz_dec_strategy,
    structured_payoffs,
)

__all__ = [
    "DecProblem", "GridDecProblem", "SaddleCertificate", "dec_constrained", "dec_offset",
    "divergence_table", "grid_oracle", "simplex_grid",
    "E2D", "E2DRound", "GeneralizedUCB", "e2d_run", "EluderResult", "eluder_dimension",
    "CheatingStrategy", "LinearStrategy", "LipschitzStrategy", "cheating_dec_strategy",
    "greedy_cover", "igw_dec_strategy", "igw_equalizer_terms", "linear_dec_strategy",
    "lipschitz_dec_strategy", "structured_payoffs",
]
