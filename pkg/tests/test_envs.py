import itertools

import numpy as np
import pytest

from dlab.envs import (
    TabularMDP, bandit_from_means, cheating_code, combination_lock, decode_cheat, env_from_spec,
    env_to_spec, occupancy, policy_value, random_low_rank_mdp, random_tabular_mdp, rollout,
)
from dlab.numprob import make_rng
from dlab.rl import value_iteration


def uniform_policy(mdp):
    return np.full((mdp.H, mdp.S, mdp.A), 1.0 / mdp.A)


def deterministic_policies(mdp):
    """Every open-loop action sequence, as (H, S) tables."""
    for seq in itertools.product(range(mdp.A), repeat=mdp.H):
        yield np.tile(np.array(seq)[:, None], (1, mdp.S))


def test_combination_lock_single_layer():
    mdp = combination_lock(1)
    assert value_iteration(mdp)[0].V[0] @ mdp.d1 == pytest.approx(1.0)


def test_combination_lock_has_one_winning_sequence():
    mdp = combination_lock(3)
    values = [policy_value(mdp, pi) for pi in deterministic_policies(mdp)]
    assert sorted(values) == [0.0] * 7 + [1.0]


@pytest.mark.parametrize("H", [1, 2, 5, 8])
def test_combination_lock_uniform_value(H):
    mdp = combination_lock(H)
    assert policy_value(mdp, uniform_policy(mdp)) == pytest.approx(2.0 ** -H, abs=1e-15)


def test_combination_lock_uniform_value_monte_carlo():
    mdp = combination_lock(3)
    rng = make_rng(0, "test/lock-mc")
    rets = np.array([rollout(mdp, uniform_policy(mdp), rng).ret for _ in range(20000)])
    se = np.sqrt(0.125 * 0.875 / rets.size)
    assert abs(rets.mean() - 0.125) <= 3 * se


def test_combination_lock_rejects_zero_horizon():
    with pytest.raises(ValueError):
        combination_lock(0)


def test_cheating_code_two_arms():
    models, env = cheating_code(2)
    assert len(models) == 2 and env.n_decisions == 3
    assert models[0].means[2] == 0.0 and models[1].means[2] == -1.0


def test_cheating_code_regret_is_a_quarter():
    models, _ = cheating_code(8)
    for i, m in enumerate(models):
        assert m.optimal_arm == i
        gaps = m.means[i] - m.means[:8]
        assert np.allclose(np.delete(gaps, i), 0.25)


def test_cheating_code_readout_identifies_model():
    models, _ = cheating_code(8)
    assert [decode_cheat(m.means[8:], 8) for m in models] == list(range(8))


def test_cheating_code_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        cheating_code(6)


def test_policy_value_zero_reward():
    rng = make_rng(1, "test/zero")
    m = random_tabular_mdp(3, 2, 3, rng)
    z = TabularMDP(m.P, np.zeros_like(m.R), m.d1)
    assert policy_value(z, uniform_policy(z)) == 0.0


def test_policy_value_all_good_lock():
    mdp = combination_lock(3)
    assert policy_value(mdp, np.ones((3, mdp.S), dtype=int)) == 1.0


def test_policy_value_matches_monte_carlo():
    rng = make_rng(2, "test/pv")
    mdp = random_tabular_mdp(3, 2, 4, rng)
    pi = rng.dirichlet(np.ones(2), size=(4, 3))
    rets = np.array([rollout(mdp, pi, rng).ret for _ in range(100_000)])
    se = rets.std() / np.sqrt(rets.size)
    assert abs(rets.mean() - policy_value(mdp, pi)) <= 3 * se


def test_occupancy_first_layer_and_conservation():
    rng = make_rng(3, "test/occ")
    mdp = random_tabular_mdp(4, 3, 5, rng)
    pi = rng.dirichlet(np.ones(3), size=(5, 4))
    d = occupancy(mdp, pi)
    np.testing.assert_allclose(d[0], mdp.d1[:, None] * pi[0], atol=1e-15)
    np.testing.assert_allclose(d.sum(axis=(1, 2)), 1.0, atol=1e-12)
    assert np.sum(d * mdp.R) == pytest.approx(policy_value(mdp, pi), abs=1e-14)


def test_occupancy_of_uniform_policy_on_lock():
    mdp = combination_lock(2)
    d = occupancy(mdp, uniform_policy(mdp))
    # second layer: half the mass is still on the chain
    assert d[1, 1].sum() == pytest.approx(0.5)


def test_rollout_pays_table_rewards_and_replays():
    rng = make_rng(4, "test/roll")
    mdp = random_tabular_mdp(3, 2, 4, rng)
    pi = rng.dirichlet(np.ones(2), size=(4, 3))
    a = rollout(mdp, pi, make_rng(9, "replay"))
    b = rollout(mdp, pi, make_rng(9, "replay"))
    assert a.tobytes() == b.tobytes()
    np.testing.assert_array_equal(a.rewards, mdp.R[np.arange(4), a.states, a.actions])


def test_rollout_rejects_bad_actions():
    mdp = combination_lock(2)
    with pytest.raises(IndexError):
        rollout(mdp, np.full((2, mdp.S), 5), make_rng(0))


def test_bernoulli_arm_with_mean_one():
    env = bandit_from_means([1.0, 0.0], "bernoulli")
    rng = make_rng(5)
    assert all(env.pull(0, rng) == 1.0 for _ in range(100))
    with pytest.raises(IndexError):
        env.pull(2, rng)


def test_bandit_ties_break_low():
    env = bandit_from_means([0.3, 0.7, 0.7])
    assert env.optimal_arm == 1 and env.optimal_mean == 0.7
    assert env.expected_regret([1, 0, 0]) == pytest.approx(0.4)


def test_random_instances_are_valid():
    rng = make_rng(6, "test/valid")
    for _ in range(20):
        m = random_tabular_mdp(4, 3, 5, rng, sparsity=0.3)
        np.testing.assert_allclose(m.P.sum(-1), 1.0, atol=1e-12)
        assert np.max(m.R) <= 1.0 / m.H


def test_low_rank_transitions_have_rank_at_most_d():
    rng = make_rng(7, "test/lowrank")
    lr = random_low_rank_mdp(6, 3, 3, 2, rng)
    tab = lr.to_tabular()
    for h in range(lr.H):
        s = np.linalg.svd(tab.P[h].reshape(-1, lr.S), compute_uv=False)
        assert np.sum(s > 1e-8) <= lr.d
        np.testing.assert_allclose(tab.P[h].sum(-1), 1.0, atol=1e-12)


def test_optimal_policy_beats_random_policies():
    rng = make_rng(8, "test/opt")
    mdp = random_tabular_mdp(4, 3, 4, rng)
    _, pi_star = value_iteration(mdp)
    best = policy_value(mdp, pi_star)
    for _ in range(100):
        assert policy_value(mdp, rng.dirichlet(np.ones(3), size=(4, 4))) <= best + 1e-12


def test_invalid_transition_rows_rejected():
    P = np.full((1, 2, 1, 2), 0.6)
    with pytest.raises(ValueError):
        TabularMDP(P, np.zeros((1, 2, 1)), np.array([1.0, 0.0]))


@pytest.mark.parametrize("spec", [
    {"type": "bandit", "means": [0.1, 0.9]},
    {"type": "combination_lock", "H": 3},
    {"type": "random_tabular", "S": 3, "A": 2, "H": 2, "seed": 4},
    {"type": "random_low_rank", "S": 4, "A": 2, "H": 2, "d": 2},
    {"type": "cheating_code", "A": 4},
    {"type": "contextual", "means": [[0.1, 0.5], [0.7, 0.2]]},
])
def test_spec_round_trip(spec):
    env = env_from_spec(spec)
    again = env_from_spec(env_to_spec(env))
    assert env_to_spec(again) == env_to_spec(env)


def test_unknown_env_type():
    with pytest.raises(ValueError, match="known"):
        env_from_spec({"type": "maze"})
