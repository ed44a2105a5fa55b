import math

import numpy as np
import pytest

from dlab.contextual import (
    EpochSquareCB, EpsGreedyCB, LinUCB, SquareCB, epoch_gammas, epoch_schedule, eps_greedy_cb_act,
    igw, igw_round_gap, squarecb_act,
)
from dlab.envs import ContextualEnv, linear_contextual
from dlab.numprob import FiniteDist, make_rng


def play(learner, env, T, rng):
    regret = np.zeros(T)
    for t in range(T):
        x = env.sample_context(rng)
        p = learner.act(x)
        regret[t] = env.expected_regret(x, p)
        a = int(min(np.searchsorted(np.cumsum(p), rng.random(), side="right"), p.size - 1))
        learner.observe(x, a, env.pull(x, a, rng), p)
    return regret


def test_igw_symmetric():
    d = igw([0.3, 0.3], 7.0)
    np.testing.assert_allclose(d.probs, 0.5, atol=1e-10)
    assert d.lam == pytest.approx(2.0, abs=1e-9)


def test_igw_two_actions_golden_ratio():
    d = igw([1.0, 0.0], 0.5)
    assert d.lam == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-9)
    np.testing.assert_allclose(d.probs, [0.6180340, 0.3819660], atol=1e-7)


def test_igw_three_actions():
    d = igw([1.0, 0.5, 0.5], 1.0)
    assert d.lam == pytest.approx(1 + math.sqrt(2), abs=1e-9)
    np.testing.assert_allclose(d.probs, [math.sqrt(2) - 1, 1 - 1 / math.sqrt(2), 1 - 1 / math.sqrt(2)],
                               atol=1e-9)


def test_igw_normalizer_on_random_inputs():
    rng = make_rng(0, "test/igw")
    for _ in range(1000):
        A = int(rng.integers(1, 9))
        f = rng.random(A)
        d = igw(f, float(rng.exponential(20)))
        assert 1.0 <= d.lam <= A
        assert abs(d.probs.sum() - 1) <= 1e-10
        assert d.probs[np.argmax(f)] == d.probs.max()


def test_igw_limits():
    np.testing.assert_allclose(squarecb_act([0.1, 0.9, 0.5], 0.0), 1 / 3)
    p = squarecb_act([0.1, 0.9, 0.5], 1e9)
    assert p[1] > 1 - 1e-8


def test_per_round_inequality_exhaustive():
    rng = make_rng(1, "test/igw-round")
    for _ in range(1000):
        A = int(rng.integers(2, 5))
        lhs, rhs = igw_round_gap(rng.random(A), rng.random(A), float(rng.uniform(0.1, 100)))
        assert lhs <= rhs


def test_epoch_schedule_doubles():
    epochs = epoch_schedule(16)
    assert [(lo, hi) for m, lo, hi in epochs if m >= 1] == [(2, 2), (3, 4), (5, 8), (9, 16)]
    g = epoch_gammas(64, 3, lambda n: 1.0 / n)
    assert all(a <= b for a, b in zip(g, g[1:]))
    with pytest.raises(ValueError):
        epoch_schedule(1)


def test_epoch_oracle_reads_only_previous_epoch():
    rng = make_rng(2, "test/epoch")
    env = ContextualEnv(FiniteDist.uniform(3), rng.random((3, 4)))
    F = np.concatenate([env.means[None], rng.random((7, 3, 4))])
    learner = EpochSquareCB(F, 100)
    play(learner, env, 100, rng)
    epochs = {m: (lo, hi) for m, lo, hi in learner.epochs}
    assert [m for m, _, _ in learner.fit_log] == list(range(1, len(learner.epochs)))
    for m, lo, hi in learner.fit_log:
        assert (lo, hi) == epochs[m - 1] and hi < epochs[m][0]


def test_eps_greedy_cb():
    np.testing.assert_allclose(eps_greedy_cb_act([0.2, 0.4, 0.1], 1.0, 3), 1 / 3)
    rng = make_rng(3, "test/egcb")
    env = ContextualEnv(FiniteDist.uniform(4), rng.random((4, 3)))
    exact = EpsGreedyCB(env.means[None], 50, eps=0.0)
    assert play(exact, env, 50, rng).sum() == 0.0


def test_squarecb_explores_more_cheaply_than_eps_greedy_cb():
    # with an exact oracle the expected regret is pure exploration cost:
    # about sqrt(T) for SquareCB against T^(2/3) for epsilon-greedy
    rng = make_rng(5, "test/scb-vs-eg")
    env = ContextualEnv(FiniteDist.uniform(5), rng.uniform(0.2, 0.8, size=(5, 6)))
    ratios = []
    for T in (1000, 8000):
        scb = play(SquareCB(env.means[None], T), env, T, make_rng(0, "scb")).sum()
        eg = play(EpsGreedyCB(env.means[None], T), env, T, make_rng(0, "eg")).sum()
        ratios.append(scb / eg)
    assert ratios[0] < 1.0 and ratios[1] < ratios[0]


def test_linucb_initial_and_bonus_behaviour():
    feats = np.array([[0.5, 0.0], [0.0, 1.0], [0.6, 0.0]])
    learner = LinUCB(feats, beta=1.0)
    assert learner.act().tolist() == [0, 1, 0]
    ortho = LinUCB(np.eye(2), beta=1.0)
    for _ in range(20):
        ortho.observe(0, 0, 0.5)
    Sinv = np.linalg.inv(ortho.Sigma)
    assert Sinv[1, 1] > Sinv[0, 0]


def test_linucb_potential_and_confidence():
    rng = make_rng(4, "test/linucb")
    d, A, X, T = 3, 5, 4, 300
    ok = 0
    for seed in range(20):
        r = make_rng(seed, "test/linucb-run")
        feats = np.abs(r.normal(size=(X, A, d)))
        feats /= np.linalg.norm(feats, axis=-1, keepdims=True) * r.uniform(1, 2, size=(X, A, 1))
        theta = np.abs(r.normal(size=d))
        theta /= np.linalg.norm(theta)
        thetas = np.concatenate([theta[None], np.abs(rng.normal(size=(15, d)))])
        thetas /= np.maximum(np.linalg.norm(thetas, axis=1, keepdims=True), 1)
        env = linear_contextual(feats, theta)
        learner = LinUCB(feats, thetas=thetas)
        valid = True
        for t in range(T):
            x = env.sample_context(r)
            a = int(np.argmax(learner.act(x)))
            learner.observe(x, a, env.pull(x, a, r))
            valid &= learner.confidence_ok(theta)
        total, bound = learner.potential_ok()
        assert total <= bound
        ok += valid
    assert ok >= 0.9 * 20
