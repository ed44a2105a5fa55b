import math

import numpy as np
import pytest

from dlab.bandits import (
    UCB, ArmStats, Exp3, ExploreThenCommit, PosteriorSampling, eps_greedy_act, etc_act,
    exp3_act, exp3_expected_regret, exp3_eta, exp3_loss_estimate, exp3_observe, posterior_sampling_act,
    ucb_act, ucb_bonus,
)
from dlab.envs import bandit_from_means, cheating_code
from dlab.estimators import ExpWeightsState
from dlab.numprob import make_rng


def play(learner, env, T, rng, each=None):
    """Run a bandit loop; returns the expected regret per round."""
    regret = np.zeros(T)
    for t in range(T):
        p = learner.act()
        if each is not None:
            each(t, learner)
        regret[t] = env.expected_regret(p)
        a = int(min(np.searchsorted(np.cumsum(p), rng.random(), side="right"), p.size - 1))
        learner.observe(None, a, env.pull(a, rng), p)
    return regret


def stats_with_means(means, n=1):
    means = np.asarray(means, dtype=float)
    return ArmStats(np.full(means.size, n, dtype=np.int64), means * n)


def test_eps_greedy_act_examples():
    np.testing.assert_allclose(eps_greedy_act(stats_with_means([0.2, 0.7, 0.1]), 1.0, 3), 1 / 3)
    np.testing.assert_allclose(eps_greedy_act(stats_with_means([0.2, 0.7]), 0.0, 2), [0, 1])
    np.testing.assert_allclose(eps_greedy_act(stats_with_means([0.9, 0.1]), 0.4, 2), [0.8, 0.2])
    # ties go to the lowest index
    np.testing.assert_allclose(eps_greedy_act(stats_with_means([0.5, 0.5]), 0.0, 2), [1, 0])


def test_ucb_examples():
    assert ucb_act(ArmStats.zeros(3), 10, 3, 0.1).tolist() == [1, 0, 0]
    assert ucb_bonus([4], 10, 2, 0.1)[0] == pytest.approx(math.sqrt(2 * math.log(4000) / 4))
    assert ucb_bonus([4], 10, 2, 0.1)[0] == pytest.approx(2.0364, abs=1e-4)
    st = ArmStats(np.array([100, 1]), np.array([50.0, 0.5]))
    assert ucb_act(st, 1000, 2, 0.1).tolist() == [0, 1]


def test_etc_examples():
    assert etc_act(ArmStats.zeros(2), 4, 2, 1).tolist() == [1, 0]
    assert etc_act(stats_with_means([0.3, 0.9]), 4, 2, 5).tolist() == [0, 1]
    with pytest.raises(ValueError):
        etc_act(ArmStats.zeros(3), 4, 3, 1)


def test_etc_never_switches_after_commit():
    env = bandit_from_means([0.4, 0.5, 0.45])
    rng = make_rng(0, "test/etc")
    learner = ExploreThenCommit(3, 30)
    chosen = []
    play(learner, env, 10_000, rng, each=lambda t, l: chosen.append(l.committed))
    assert len(set(chosen[31:])) == 1 and chosen[31] is not None


def test_posterior_sampling_is_exact():
    models, _ = cheating_code(2)
    M = np.stack([m.means for m in models])
    np.testing.assert_allclose(posterior_sampling_act([0.5, 0.5], M), [0.5, 0.5, 0.0])
    np.testing.assert_allclose(posterior_sampling_act([0.9, 0.1], M), [0.9, 0.1, 0.0])


def test_posterior_sampling_bayesian_regret():
    A, T = 5, 5000
    M = np.full((A, A), 0.4)
    np.fill_diagonal(M, 0.6)
    finals = []
    for seed in range(20):
        rng = make_rng(seed, "test/ps")
        truth = int(rng.integers(A))
        reg = play(PosteriorSampling(M), bandit_from_means(M[truth]), T, rng)
        finals.append(reg.sum())
    assert np.median(finals) <= math.sqrt(A * T * math.log(A))


def test_exp3_estimator():
    np.testing.assert_allclose(exp3_loss_estimate(2, 0, 1.0, [0.5, 0.5]), [2.0, 0.0])
    p = np.array([0.2, 0.3, 0.5])
    loss = np.array([0.7, 0.1, 0.4])
    mean = sum(p[a] * exp3_loss_estimate(3, a, loss[a], p) for a in range(3))
    np.testing.assert_allclose(mean, loss, atol=1e-15)
    with pytest.raises(ValueError):
        exp3_loss_estimate(2, 1, 1.0, [1.0, 0.0])


def test_exp3_zero_losses_stay_uniform():
    st = ExpWeightsState.init(4, exp3_eta(4, 100))
    for t in range(100):
        st = exp3_observe(st, t % 4, 0.0, exp3_act(st))
    np.testing.assert_allclose(exp3_act(st), 0.25)


def test_exp3_exact_regret_on_small_trees():
    rng = make_rng(1, "test/exp3-tree")
    for T in (4, 8, 12):
        for _ in range(3):
            L = rng.random((T, 2))
            assert exp3_expected_regret(L, exp3_eta(2, T)) <= 3 * math.sqrt(2 * T * math.log(2))


def test_exp3_monte_carlo_regret():
    A, T = 4, 2000
    env = bandit_from_means([0.5, 0.45, 0.4, 0.6], "bernoulli")
    finals = [play(Exp3(A, T), env, T, make_rng(s, "test/exp3")).sum() for s in range(10)]
    assert np.median(finals) <= 3 * math.sqrt(A * T * math.log(A))


def test_ucb_confidence_validity_and_width_bound():
    means = np.array([0.5, 0.3, 0.45])
    env = bandit_from_means(means)
    T, delta = 200, 0.1
    valid_runs = 0
    for seed in range(200):
        learner = UCB(3, T, delta)
        ok = [True]
        widths_ok = [True]

        def audit(t, l):
            lo, hi = l.bounds()
            if np.all((lo <= means) & (means <= hi)):
                a = int(np.argmax(l.act()))
                if means.max() - means[a] > hi[a] - lo[a] + 1e-12:
                    widths_ok[0] = False
            else:
                ok[0] = False

        play(learner, env, T, make_rng(seed, "test/ucb"), each=audit)
        valid_runs += ok[0]
        assert widths_ok[0]
        assert sum(learner.width_terms) <= 3 + 2 * math.sqrt(3 * T)
    assert valid_runs >= (1 - delta) * 200
