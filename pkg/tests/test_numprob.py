import math

import numpy as np
import pytest
from scipy.optimize import linprog

from dlab.numprob import (
    FiniteDist, LpProblem, LpStatus, divergence, g_optimal_design, hellinger_sq,
    hellinger_sq_gaussian, kl, leverages, make_rng, solve_lp, substream, tv, vertex_enumeration,
)


def random_pair(rng, n):
    return rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))


# divergences

def test_identical_distributions_have_zero_divergence():
    p = FiniteDist([0.5, 0.5])
    for kind in ("TV", "HellingerSq", "KL"):
        assert divergence(kind, p, p) == 0.0


def test_disjoint_supports():
    p, q = [1.0, 0.0], [0.0, 1.0]
    assert tv(p, q) == 1.0
    assert hellinger_sq(p, q) == pytest.approx(2.0, abs=1e-15)
    assert kl(p, q) == math.inf


def test_direct_sums_and_ordering():
    p, q = np.array([0.5, 0.5]), np.array([0.25, 0.75])
    assert tv(p, q) == pytest.approx(0.25, abs=1e-15)
    h = np.sum((np.sqrt(p) - np.sqrt(q)) ** 2)
    k = np.sum(p * np.log(p / q))
    assert hellinger_sq(p, q) == pytest.approx(h, abs=1e-15)
    assert kl(p, q) == pytest.approx(k, abs=1e-15)
    assert tv(p, q) ** 2 <= hellinger_sq(p, q) <= kl(p, q)


def test_kl_infinite_only_without_absolute_continuity():
    assert kl([0.5, 0.5, 0.0], [0.5, 0.0, 0.5]) == math.inf
    assert math.isfinite(kl([0.5, 0.0, 0.5], [0.5, 0.25, 0.25]))


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        tv([0.5, 0.5], [1 / 3, 1 / 3, 1 / 3])


def test_ordering_on_random_pairs():
    rng = make_rng(1, "test/ordering")
    for _ in range(1000):
        p, q = random_pair(rng, int(rng.integers(2, 7)))
        assert tv(p, q) ** 2 <= hellinger_sq(p, q) + 1e-15
        assert hellinger_sq(p, q) <= kl(p, q) + 1e-15


def test_hellinger_triangle_inequality():
    rng = make_rng(2, "test/triangle")
    for _ in range(500):
        p, q, r = (rng.dirichlet(np.ones(4)) for _ in range(3))
        d = lambda a, b: math.sqrt(hellinger_sq(a, b))
        assert d(p, r) <= d(p, q) + d(q, r) + 1e-9


def test_data_processing_when_merging_atoms():
    rng = make_rng(3, "test/merge")
    merge = lambda x: np.array([x[0] + x[1], x[2], x[3]])
    for _ in range(500):
        p, q = random_pair(rng, 4)
        for f in (tv, hellinger_sq, kl):
            assert f(merge(p), merge(q)) <= f(p, q) + 1e-12


def test_gaussian_hellinger_closed_form():
    assert hellinger_sq_gaussian(0.5, 0.5) == 0.0
    assert hellinger_sq_gaussian(0.5, 1.5) == pytest.approx(1 - math.exp(-1 / 8), abs=1e-15)
    assert hellinger_sq_gaussian(0.5, 1.5) == pytest.approx(0.117503, abs=1e-6)
    vals = [hellinger_sq_gaussian(0.0, g) for g in np.linspace(0, 40, 50)]
    assert np.all(np.diff(vals) >= 0) and vals[-1] == pytest.approx(1.0)


def test_finite_dist_validation():
    with pytest.raises(ValueError):
        FiniteDist([0.5, 0.6])
    with pytest.raises(ValueError):
        FiniteDist([])
    assert FiniteDist([1, 3], normalize=True).probs.tolist() == [0.25, 0.75]
    p = FiniteDist.from_log_weights([0.0, -1e4])
    assert p.probs[0] == 1.0


# linear programs

def test_lp_maximize_bounded_variable():
    res = solve_lp(LpProblem(np.array([1.0]), np.array([[1.0]]), np.array([1.0]), maximize=True))
    assert res.ok and res.value == pytest.approx(1.0) and res.x[0] == pytest.approx(1.0)


def test_lp_simplex_vertex():
    res = solve_lp(LpProblem(np.array([3.0, 1.0, 2.0]), A_eq=np.ones((1, 3)), b_eq=np.ones(1)))
    assert res.value == pytest.approx(1.0)
    np.testing.assert_allclose(res.x, [0, 1, 0], atol=1e-12)


def test_lp_infeasible_and_unbounded_are_distinct():
    infeasible = LpProblem(np.array([1.0]), np.array([[1.0]]), np.array([-1.0]))
    unbounded = LpProblem(np.array([1.0]), maximize=True)
    assert solve_lp(infeasible).status is LpStatus.INFEASIBLE
    assert solve_lp(unbounded).status is LpStatus.UNBOUNDED


def random_feasible_lp(rng, m, n):
    A = rng.normal(size=(m, n))
    x0 = rng.random(n)
    b = A @ x0 + rng.random(m)
    # a box keeps the problem bounded
    A = np.vstack([A, np.eye(n)])
    b = np.concatenate([b, np.full(n, 2.0)])
    return LpProblem(rng.normal(size=n), A, b)


def test_lp_matches_vertex_enumeration_and_scipy():
    rng = make_rng(4, "test/lp")
    for _ in range(20):
        prob = random_feasible_lp(rng, 5, int(rng.integers(2, 6)))
        res = solve_lp(prob)
        oracle, _ = vertex_enumeration(prob)
        ref = linprog(prob.c, A_ub=prob.A_ub, b_ub=prob.b_ub, bounds=[(0, None)] * prob.n)
        assert res.ok
        assert res.value == pytest.approx(oracle, abs=1e-6)
        assert res.value == pytest.approx(ref.fun, abs=1e-8)
        assert np.all(prob.A_ub @ res.x <= prob.b_ub + 1e-9) and np.all(res.x >= -1e-9)


def test_lp_five_by_eight():
    rng = make_rng(5, "test/lp58")
    A = rng.normal(size=(5, 8))
    b = A @ rng.random(8) + 0.5
    prob = LpProblem(rng.normal(size=8), A_eq=None, A_ub=np.vstack([A, np.eye(8)]),
                     b_ub=np.concatenate([b, np.ones(8)]))
    oracle, _ = vertex_enumeration(prob)
    assert solve_lp(prob).value == pytest.approx(oracle, abs=1e-6)


def test_lp_equalities_and_lower_bounds_against_scipy():
    rng = make_rng(6, "test/lp-eq")
    for _ in range(10):
        n = 6
        x0 = rng.random(n)
        Aeq = rng.normal(size=(2, n))
        lb = -rng.random(n)
        prob = LpProblem(rng.normal(size=n), np.eye(n), np.full(n, 3.0), Aeq, Aeq @ x0, lb)
        res = solve_lp(prob)
        ref = linprog(prob.c, A_ub=np.eye(n), b_ub=np.full(n, 3.0), A_eq=Aeq, b_eq=Aeq @ x0,
                      bounds=list(zip(lb, [None] * n)))
        assert res.value == pytest.approx(ref.fun, abs=1e-8)
        np.testing.assert_allclose(Aeq @ res.x, Aeq @ x0, atol=1e-9)


# G-optimal design

def test_design_on_basis_vectors_is_uniform():
    res = g_optimal_design(np.eye(4))
    np.testing.assert_allclose(res.design.probs, 0.25, atol=1e-12)
    assert res.max_leverage == pytest.approx(4.0, abs=1e-12)


def test_design_on_ellipsoid_eigenpoints():
    rng = make_rng(7, "test/ellipsoid")
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    lam = np.array([0.5, 2.0, 5.0])
    pts = (Q / np.sqrt(lam)).T  # rows lam_i^{-1/2} v_i
    res = g_optimal_design(pts, tol=1e-6)
    np.testing.assert_allclose(res.design.probs, 1 / 3, atol=1e-6)


def test_design_on_random_unit_vectors():
    rng = make_rng(8, "test/unit")
    X = rng.normal(size=(50, 3))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    tol = 1e-3
    res = g_optimal_design(X, tol=tol)
    p = res.design.probs
    direct = np.einsum("ij,jk,ik->i", X, np.linalg.inv(X.T @ (p[:, None] * X)), X)
    assert res.converged
    assert direct.max() <= 3 * (1 + tol)
    assert direct[p > 0].min() >= 3 * (1 - tol)
    np.testing.assert_allclose(leverages(X, p), direct, atol=1e-9)


def test_design_on_rank_deficient_points():
    X = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]])
    res = g_optimal_design(X)
    assert res.rank == 2 and res.max_leverage <= 2 * (1 + 1e-3)


def test_design_rejects_zero_points():
    with pytest.raises(ValueError):
        g_optimal_design(np.zeros((3, 2)))


# random streams

def test_streams_replay_and_separate():
    a = make_rng(11, "exp").random(5)
    assert np.array_equal(a, make_rng(11, "exp").random(5))
    assert not np.array_equal(a, make_rng(12, "exp").random(5))
    assert not np.array_equal(a, make_rng(11, "other").random(5))
    assert not np.array_equal(substream(11, "exp", 0).random(3), substream(11, "exp", 1).random(3))


def test_seed_must_be_64_bit():
    with pytest.raises(ValueError):
        make_rng(-1)
    make_rng(2 ** 64 - 1)
