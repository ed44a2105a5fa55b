"""Exact evaluation of both sides of the classical value-decomposition identities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..envs.mdp import TabularMDP, as_stochastic, occupancy, policy_q, policy_value
from .planning import bellman_residuals, greedy, trajectory_hellinger_sq


@dataclass
class IdentityRow:
    lhs: float
    rhs: float

    @property
    def discrepancy(self) -> float:
        return abs(self.lhs - self.rhs)


def performance_difference(mdp: TabularMDP, pi, pi_ref) -> IdentityRow:
    """f(pi_ref) - f(pi) = sum_h E^pi[ V^ref_h(s_h) - Q^ref_h(s_h, a_h) ]."""
    lhs = policy_value(mdp, pi_ref) - policy_value(mdp, pi)
    Q, V = policy_q(mdp, pi_ref)
    d = occupancy(mdp, pi)
    rhs = float(np.sum(d * (V[:-1, :, None] - Q[:-1])))
    return IdentityRow(lhs, rhs)


def bellman_residual_greedy(mdp: TabularMDP, Q) -> IdentityRow:
    """E_{d1}[max_a Q_1] - f(pi_Q) = sum_h E^{pi_Q}[(Q_h - T_h Q_{h+1})(s_h, a_h)]."""
    Q = np.asarray(Q, dtype=float)[: mdp.H]
    pi = greedy(Q)
    lhs = float(mdp.d1 @ Q[0].max(axis=-1)) - policy_value(mdp, pi)
    rhs = float(np.sum(occupancy(mdp, pi) * bellman_residuals(mdp, Q)))
    return IdentityRow(lhs, rhs)


def bellman_residual_models(m: TabularMDP, mhat: TabularMDP, pi) -> IdentityRow:
    """f^M(pi) - f^Mhat(pi) = sum_h E^{Mhat, pi}[Q^M_h - r^Mhat_h - P^Mhat_h V^M_{h+1}].

    Models with different initial laws pick up the start-law shift term.
    """
    lhs = policy_value(m, pi) - policy_value(mhat, pi)
    Q, V = policy_q(m, pi)
    d = occupancy(mhat, pi)
    terms = np.stack([Q[h] - mhat.R[h] - mhat.P[h] @ V[h + 1] for h in range(m.H)])
    return IdentityRow(lhs, float(np.sum(d * terms)) + _start_shift(m, mhat, V))


def _start_shift(m: TabularMDP, mhat: TabularMDP, V) -> float:
    """E_{d1}[V^M_1] - E_{d1hat}[V^M_1]; zero when both models share a start law."""
    return float((m.d1 - mhat.d1) @ V[0])


def simulation_identity(m: TabularMDP, mhat: TabularMDP, pi) -> IdentityRow:
    """f^M - f^Mhat = sum_h E^{Mhat,pi}[(P_h - Phat_h) V^M_{h+1} + (r_h - rhat_h)], plus the start-law shift."""
    lhs = policy_value(m, pi) - policy_value(mhat, pi)
    _, V = policy_q(m, pi)
    d = occupancy(mhat, pi)
    terms = np.stack([(m.P[h] - mhat.P[h]) @ V[h + 1] + (m.R[h] - mhat.R[h]) for h in range(m.H)])
    return IdentityRow(lhs, float(np.sum(d * terms)) + _start_shift(m, mhat, V))


def simulation_bound(m: TabularMDP, mhat: TabularMDP, pi) -> tuple[float, float, float]:
    """(|f^M - f^Mhat|, per-layer TV sum, trajectory Hellinger distance); first <= both others."""
    gap = abs(policy_value(m, pi) - policy_value(mhat, pi))
    d = occupancy(mhat, pi)
    tv = 0.5 * np.abs(m.P - mhat.P).sum(-1) + (~np.isclose(m.R, mhat.R)).astype(float)
    return gap, float(np.sum(d * tv)), float(np.sqrt(trajectory_hellinger_sq(m, mhat, pi)))


def identity_checks(mdp: TabularMDP, pi, pi_other, Q, mdp_other: TabularMDP | None = None) -> dict:
    """Both sides of every identity plus their absolute discrepancies."""
    report = {
        "performance_difference": performance_difference(mdp, pi, pi_other),
        "bellman_residual_greedy": bellman_residual_greedy(mdp, Q),
    }
    if mdp_other is not None:
        report["bellman_residual_models"] = bellman_residual_models(mdp, mdp_other, pi)
        report["simulation"] = simulation_identity(mdp, mdp_other, pi)
    return report
