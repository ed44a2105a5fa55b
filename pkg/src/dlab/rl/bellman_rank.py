"""Exact Q-type Bellman residual matrices and their numeric rank."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..envs.mdp import TabularMDP, occupancy
from .planning import bellman_residuals

RANK_TOL = 1e-8


@dataclass
class BellmanFactorization:
    matrices: list          # per layer, rows = policies, columns = Q functions
    singular_values: list

    @property
    def ranks(self) -> list[int]:
        return [int(np.sum(sv > RANK_TOL)) for sv in self.singular_values]

    @property
    def rank(self) -> int:
        return max(self.ranks)


def residual_matrices(mdp: TabularMDP, Qs, policies) -> list[np.ndarray]:
    occ = np.stack([occupancy(mdp, pi) for pi in policies])            # (P, H, S, A)
    res = np.stack([bellman_residuals(mdp, Q) for Q in Qs])           # (Q, H, S, A)
    return [occ[:, h].reshape(len(policies), -1) @ res[:, h].reshape(len(Qs), -1).T for h in range(mdp.H)]


def bellman_rank(mdp: TabularMDP, Qs, policies) -> BellmanFactorization:
    mats = residual_matrices(mdp, Qs, policies)
    svs = [np.linalg.svd(m, compute_uv=False) for m in mats]
    return BellmanFactorization(mats, svs)
