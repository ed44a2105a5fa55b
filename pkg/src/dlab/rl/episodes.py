"""Episode loop shared by the tabular learners, with exact expected regret."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..envs.mdp import TabularMDP, policy_value, rollout
from .planning import optimal_value


@dataclass
class EpisodeLedger:
    optimal: float
    expected: list = field(default_factory=list)   # f(pi*) - f(pi_t), exact
    returns: list = field(default_factory=list)    # realized episode return
    optimism: list = field(default_factory=list)   # V_bar_1 >= V*_1 per episode, when available

    @property
    def cum_regret(self) -> np.ndarray:
        return np.cumsum(self.expected)

    def mean_return(self, last: int | None = None) -> float:
        r = np.asarray(self.returns, dtype=float)
        return float(r[-last:].mean() if last else r.mean())


def run_episodes(mdp: TabularMDP, learner, T: int, rng: np.random.Generator) -> EpisodeLedger:
    vstar = optimal_value(mdp)
    ledger = EpisodeLedger(vstar)
    for _ in range(T):
        pi = learner.policy()
        ledger.expected.append(vstar - policy_value(mdp, pi))
        if hasattr(learner, "optimistic_value"):
            ledger.optimism.append(learner.optimistic_value(mdp.d1) >= vstar - 1e-12)
        traj = rollout(mdp, pi, rng)
        ledger.returns.append(traj.ret)
        learner.observe_trajectory(traj)
    return ledger
