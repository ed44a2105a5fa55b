"""Acceptance suite: fifteen checks, each with a runtime budget and a one-line verdict."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..contextual import LinUCB, igw_round_gap
from ..dec_lab import GeneralizedUCB, GridDecProblem, dec_offset, e2d_run, eluder_dimension
from ..envs import (
    bandit_from_means, cheating_code, combination_lock, linear_contextual,
    policy_value, random_low_rank_mdp, random_tabular_mdp,
)
from ..estimators import LogLossPosterior, default_eta, exp_weights_regret
from ..numprob import g_optimal_design, hellinger_sq, hellinger_sq_gaussian, kl, make_rng, tv
from ..rl import (
    LSVIUCB, UCBVI, EpsGreedyMDP, bellman_rank, bilin_beta, bilinucb_run, identity_checks,
    linear_q_class, optimal_value, run_episodes, value_iteration,
)
from .config import ExperimentConfig
from .run import run_experiment
from .sweep import growth_exponent


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float | None = None

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


CRITERIA = {}


def criterion(number: int, title: str, budget: float | None):
    def deco(fn):
        def wrapped() -> CriterionResult:
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            within = budget is None or dt <= budget
            if not within:
                detail += f"; over the {budget:g}s budget"
            return CriterionResult(number, title, bool(ok and within), detail, dt, budget)
        CRITERIA[number] = wrapped
        wrapped.__name__ = fn.__name__
        return wrapped
    return deco


def run_all(numbers=None) -> list[CriterionResult]:
    return [CRITERIA[n]() for n in sorted(numbers or CRITERIA)]


# ---------------------------------------------------------------- 1

@criterion(1, "IGW exactness on the mean-grid DEC", 10)
def igw_exactness():
    grid = np.round(np.arange(101) / 100, 2)
    worst, misses = 0.0, []
    for A in (2, 3, 5):
        for gamma in (1.0, 10.0):
            cert = dec_offset(GridDecProblem(grid, np.full(A, 0.5), gamma))
            target = (A - 1) / (4 * gamma)
            err = abs(cert.value - target)
            worst = max(worst, err)
            if err > 2e-3:
                misses.append(f"A={A},gamma={gamma:g}: {cert.value:.4f} vs {target:.4f}")
    return not misses, f"max error {worst:.2e}" + (f"; misses: {'; '.join(misses)}" if misses else "")


# ---------------------------------------------------------------- 2

def gaussian_hellinger_numeric(mu1: float, mu2: float) -> float:
    """Halved squared Hellinger between unit Gaussians, 1 - Bhattacharyya coefficient by quadrature."""
    x = np.linspace(min(mu1, mu2) - 40, max(mu1, mu2) + 40, 200_001)
    p = np.exp(-0.5 * (x - mu1) ** 2) / math.sqrt(2 * math.pi)
    q = np.exp(-0.5 * (x - mu2) ** 2) / math.sqrt(2 * math.pi)
    return 1.0 - float(np.trapezoid(np.sqrt(p * q), x))


@criterion(2, "divergence ordering and Gaussian Hellinger", 1)
def divergence_ordering():
    rng = make_rng(2, "acceptance/divergences")
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        t, h, k = tv(p, q), hellinger_sq(p, q), kl(p, q)
        bad += not (t * t <= h <= k)
    err = max(abs(hellinger_sq_gaussian(0.0, g) - gaussian_hellinger_numeric(0.0, g)) for g in (0.1, 0.5, 1.0, 2.0, 3.0))
    closed = max(abs(hellinger_sq_gaussian(0.0, g) - (1 - math.exp(-g * g / 8))) for g in (0.1, 0.5, 1.0, 2.0, 3.0))
    ok = bad == 0 and err <= 1e-12 and closed <= 1e-12
    return ok, f"{bad} ordering violations; quadrature error {err:.1e}"


# ---------------------------------------------------------------- 3

@criterion(3, "performance-difference, Bellman-residual and simulation identities", 5)
def identity_suite():
    rng = make_rng(3, "acceptance/identities")
    worst = 0.0
    for _ in range(50):
        S, A, H = int(rng.integers(2, 6)), int(rng.integers(2, 4)), int(rng.integers(2, 7))
        m, m2 = random_tabular_mdp(S, A, H, rng), random_tabular_mdp(S, A, H, rng)
        pi, pi2 = rng.dirichlet(np.ones(A), size=(H, S)), rng.dirichlet(np.ones(A), size=(H, S))
        Q = rng.random((H, S, A))
        for row in identity_checks(m, pi, pi2, Q, m2).values():
            worst = max(worst, row.discrepancy)
    return worst <= 1e-10, f"max discrepancy {worst:.1e} over 50 instances"


# ---------------------------------------------------------------- 4

RATE_MEANS = [0.9, 0.7, 0.6, 0.5, 0.5, 0.4, 0.4, 0.3, 0.2, 0.1]


@criterion(4, "UCB vs epsilon-greedy rate separation", 120)
def rate_separation():
    out = {}
    for algo in ("ucb", "eps_greedy"):
        cfg = ExperimentConfig(env={"type": "bandit", "means": RATE_MEANS, "noise": "gaussian"},
                               algo={"name": algo}, T=20000, seeds=list(range(20)), name=f"acceptance/rates/{algo}")
        curves = np.stack([led.cum for led in run_experiment(cfg, write=False)])
        out[algo] = (float(np.median(curves[:, -1])), growth_exponent(np.median(curves, axis=0)))
    (u_med, u_exp), (e_med, e_exp) = out["ucb"], out["eps_greedy"]
    ok = u_med < e_med and u_exp <= 0.65 and e_exp >= 0.6
    return ok, (f"median regret ucb {u_med:.0f} vs eps-greedy {e_med:.0f}; "
                f"exponents {u_exp:.2f} / {e_exp:.2f}")


# ---------------------------------------------------------------- 5

@criterion(5, "combination lock: epsilon-greedy fails, UCB-VI succeeds", 180)
def combination_lock_gap():
    H, T = 8, 3000
    mdp = combination_lock(H)
    eg, uv = [], []
    for seed in range(10):
        led = run_episodes(mdp, EpsGreedyMDP(mdp.S, mdp.A, H, mdp.R, 0.1), T, make_rng(seed, "acceptance/lock/eps"))
        eg.append(led.mean_return())
        led = run_episodes(mdp, UCBVI(mdp.S, mdp.A, H, mdp.R, T, 0.1, mdp.d1), T, make_rng(seed, "acceptance/lock/ucbvi"))
        uv.append(led.mean_return(last=200))
    e, u = float(np.median(eg)), float(np.median(uv))
    return e <= 0.05 and u >= 0.5, f"median eps-greedy mean return {e:.3f}, UCB-VI last-200 return {u:.3f}"


# ---------------------------------------------------------------- 6 and 14

CHEAT_A, CHEAT_T, CHEAT_GAMMA, CHEAT_SEEDS = 16, 5000, 1000.0, 10


@lru_cache(maxsize=1)
def cheating_runs():
    """Paired runs: per seed, the same true model for E2D and generalized UCB."""
    _, env = cheating_code(CHEAT_A)
    F = env.fclass
    rows = []
    for seed in range(CHEAT_SEEDS):
        truth = int(make_rng(seed, "acceptance/cheat/truth").integers(CHEAT_A))
        agent = e2d_run(F, truth, CHEAT_GAMMA, CHEAT_T, make_rng(seed, "acceptance/cheat/e2d"),
                        ref="map", strategy="cheating", cheat_A=CHEAT_A)
        e2d_regret = math.fsum(r.regret for r in agent.rounds)
        bandit = bandit_from_means(F[truth])
        ucb = GeneralizedUCB(F)
        rng = make_rng(seed, "acceptance/cheat/ucb")
        ucb_regret = 0.0
        for _ in range(CHEAT_T):
            a = int(np.argmax(ucb.act()))
            ucb_regret += bandit.optimal_mean - bandit.means[a]
            ucb.observe(None, a, bandit.pull(a, rng))
        rows.append((truth, e2d_regret, ucb_regret, max(ucb.chosen), agent))
    return rows


@criterion(6, "cheating code: E2D beats generalized UCB, UCB never cheats", 120)
def cheating_code_gap():
    rows = cheating_runs()
    e2d = math.fsum(r[1] for r in rows)
    ucb = math.fsum(r[2] for r in rows)
    never = all(r[3] < CHEAT_A for r in rows)
    ratio = e2d / ucb if ucb > 0 else float("inf")
    return ratio <= 0.25 and never, (f"E2D/UCB total regret {ratio:.3f} over {len(rows)} paired seeds; "
                                      f"cheat arm pulled by UCB: {'no' if never else 'yes'}")


@lru_cache(maxsize=1)
def solver_e2d_runs():
    """E2D driven by the exact DEC solver on a small Gaussian class."""
    rng = make_rng(14, "acceptance/e2d/class")
    F = rng.random((6, 3))
    return [e2d_run(F, seed % 6, 5.0, 150, make_rng(seed, "acceptance/e2d/run")) for seed in range(3)]


@criterion(14, "E2D bookkeeping inequality on every run", None)
def e2d_bookkeeping():
    agents = [r[4] for r in cheating_runs()] + list(solver_e2d_runs())
    worst = -np.inf
    bad = 0
    for ag in agents:
        reg, bound = ag.bookkeeping()
        worst = max(worst, reg - bound)
        bad += reg > bound
    return bad == 0, f"{bad} violations over {len(agents)} runs (max regret minus bound {worst:.3g})"


# ---------------------------------------------------------------- 7

@criterion(7, "SquareCB per-round inequality", 1)
def squarecb_round():
    rng = make_rng(7, "acceptance/igw")
    bad = 0
    for _ in range(1000):
        A = int(rng.integers(2, 5))
        gamma = float(10 ** rng.uniform(-1, 2))
        lhs, rhs = igw_round_gap(rng.random(A), rng.random(A), gamma)
        bad += lhs > rhs
    return bad == 0, f"{bad} violations in 1000 triples"


# ---------------------------------------------------------------- 8 and 12

def _positive_unit(rng, shape, d):
    v = np.abs(rng.normal(size=shape + (d,)))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    return v * rng.uniform(0.3, 1.0, size=shape + (1,))


@lru_cache(maxsize=1)
def linucb_runs(n_runs: int = 50, T: int = 300):
    out = []
    for seed in range(n_runs):
        rng = make_rng(seed, "acceptance/linucb/env")
        feats = _positive_unit(rng, (5, 4), 3)
        thetas = _positive_unit(rng, (16,), 3)
        env = linear_contextual(feats, thetas[0])
        L = LinUCB(feats, thetas=thetas, delta=0.1)
        run_rng = make_rng(seed, "acceptance/linucb/run")
        valid = True
        for _ in range(T):
            x = env.sample_context(run_rng)
            a = int(np.argmax(L.act(x)))
            L.observe(x, a, env.pull(x, a, run_rng))
            valid &= L.confidence_ok(thetas[0])
        out.append((L, valid))
    return out


@lru_cache(maxsize=1)
def lsvi_runs(n_runs: int = 50, T: int = 100):
    out = []
    for seed in range(n_runs):
        model = random_low_rank_mdp(6, 2, 3, 2, make_rng(seed, "acceptance/lsvi/env"))
        L = LSVIUCB(model.phi, model.H, T, 0.1, audit_model=model)
        run_episodes(model.to_tabular(), L, T, make_rng(seed, "acceptance/lsvi/run"))
        out.append(L)
    return out


@criterion(8, "elliptic potential bound on every LinUCB and LSVI-UCB run", None)
def elliptic_potential():
    bad, checked = 0, 0
    for L, _ in linucb_runs():
        total, bound = L.potential_ok()
        bad += total > bound
        checked += 1
    for L in lsvi_runs():
        bound = L.potential_bound(L.n)
        bad += int(np.sum(L.potential > bound))
        checked += L.H
    return bad == 0, f"{bad} violations over {checked} run-layer checks"


@criterion(12, "optimism and confidence audits", 240)
def optimism_audits():
    delta = 0.1
    held = []
    for seed in range(200):
        mdp = random_tabular_mdp(3, 2, 3, make_rng(seed, "acceptance/ucbvi_audit/env"))
        led = run_episodes(mdp, UCBVI(mdp.S, mdp.A, mdp.H, mdp.R, 50, delta, mdp.d1), 50,
                           make_rng(seed, "acceptance/ucbvi_audit/run"))
        held.append(all(led.optimism))
    f_ucbvi = float(np.mean(held))
    f_lin = float(np.mean([v for _, v in linucb_runs()]))
    f_lsvi = float(np.mean([L.confidence_ok for L in lsvi_runs()]))
    ok = min(f_ucbvi, f_lin, f_lsvi) >= 1 - delta
    return ok, f"UCB-VI optimism {f_ucbvi:.2f}, LinUCB {f_lin:.2f}, LSVI-UCB {f_lsvi:.2f} (need >= {1 - delta:.2f})"


# ---------------------------------------------------------------- 9

def linear_eluder_fixture():
    angles = np.arange(10) * np.pi / 10
    decisions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    thetas = np.array([[r * math.cos(t), r * math.sin(t)]
                       for r in (0.25, 0.5, 0.75, 1.0) for t in np.arange(8) * np.pi / 4])
    return thetas @ decisions.T


@criterion(9, "eluder dimension fixtures", 30)
def eluder_fixtures():
    full = np.array([[(k >> i) & 1 for i in range(3)] for k in range(8)], dtype=float)
    v_full = eluder_dimension(full, 0.4).value
    v_single = eluder_dimension(np.array([[0.2, 0.5, 0.9]]), 0.1).value
    v_lin = eluder_dimension(linear_eluder_fixture(), 0.3).value
    ok = v_full == 3 and v_single == 1 and v_lin <= 8
    return ok, f"binary class {v_full}, singleton {v_single}, linear d=2 {v_lin} (bound 8)"


# ---------------------------------------------------------------- 10

@criterion(10, "G-optimal design leverage", 5)
def design_leverage():
    rng = make_rng(10, "acceptance/design")
    worst = 0.0
    sets = [np.eye(4)]
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    lam = np.array([0.5, 2.0, 5.0])
    sets.append((Q / np.sqrt(lam)).T)          # rows lambda_i^{-1/2} v_i
    sets += [rng.normal(size=(int(rng.integers(4, 20)), 3)) for _ in range(50)]
    for X in sets:
        res = g_optimal_design(X, tol=1e-3)
        worst = max(worst, res.leverages.max() / res.rank)
    return worst <= 1 + 1e-3, f"max leverage / d = {worst:.6f} over {len(sets)} point sets"


# ---------------------------------------------------------------- 11

@criterion(11, "Bellman rank bounds", 10)
def bellman_rank_bounds():
    rng = make_rng(11, "acceptance/bellman_rank")
    notes, ok, zero = [], True, 0.0
    for _ in range(5):
        m = random_tabular_mdp(2, 2, 3, rng)
        Qstar = value_iteration(m)[0].Q
        Qs = [rng.random((3, 2, 2)) for _ in range(12)] + [Qstar]
        pis = [rng.dirichlet(np.ones(2), size=(3, 2)) for _ in range(12)]
        f = bellman_rank(m, Qs, pis)
        ok &= f.rank <= 4
        zero = max(zero, max(np.abs(M[:, -1]).max() for M in f.matrices))
        notes.append(f.rank)
    for d in (1, 2, 3):
        lr = random_low_rank_mdp(5, 3, 3, d, rng)
        m = lr.to_tabular()
        Qs = [np.einsum("sad,hd->hsa", lr.phi, rng.normal(size=(3, d))) for _ in range(15)]
        Qs.append(value_iteration(m)[0].Q)
        pis = [rng.dirichlet(np.ones(3), size=(3, 5)) for _ in range(15)]
        f = bellman_rank(m, Qs, pis)
        ok &= f.rank <= d
        zero = max(zero, max(np.abs(M[:, -1]).max() for M in f.matrices))
        notes.append(f.rank)
    ok &= zero <= 1e-10
    return ok, f"ranks {notes} (tabular <= 4, low-rank <= 1, 2, 3); Q* column max {zero:.1e}"


# ---------------------------------------------------------------- 13

BILIN_N = 200


def bilin_fixture():
    model = random_low_rank_mdp(6, 2, 3, 2, make_rng(1, "bilin_instance"))
    Qs = linear_q_class(model, 32, 1.0, make_rng(0, "bilin_class"))
    K = math.ceil(model.H * model.d * math.log(1 + BILIN_N / model.d))
    return model, Qs, K


@criterion(13, "BiLinUCB PAC guarantee", 180)
def bilinucb_pac():
    model, Qs, K = bilin_fixture()
    mdp = model.to_tabular()
    vstar = optimal_value(mdp)
    beta = bilin_beta(K, BILIN_N, len(Qs), mdp.H, 0.1)
    good = kept = 0
    for seed in range(10):
        rep = bilinucb_run(mdp, Qs, K, BILIN_N, beta, make_rng(seed, "acceptance/bilin"), truth_index=0)
        good += vstar - policy_value(mdp, rep.policy) <= 0.1
        kept += all(rep.truth_kept)
    return good >= 9 and kept >= 9, f"{good}/10 near-optimal, Q* kept in {kept}/10"


# ---------------------------------------------------------------- 15

def loss_streams():
    rng = make_rng(15, "acceptance/streams")
    T = 500
    alt = np.zeros((T, 2))
    alt[1::2, 0] = 1.0
    alt[0::2, 1] = 1.0
    alt[0, 1] = 0.5
    good = rng.random((T, 6))
    good[:, 2] *= 0.3
    return {
        "uniform": rng.random((T, 8)),
        "bernoulli": (rng.random((T, 5)) < rng.random(5)).astype(float),
        "alternating": alt,
        "one-good-expert": good,
    }


def density_streams():
    rng = make_rng(15, "acceptance/density_streams")
    out = {}
    for name, (M, truth) in {"gaussian-5": (5, 2), "gaussian-12": (12, 7)}.items():
        means = rng.random(M)
        ys = means[truth] + rng.normal(size=400)
        out[name] = -0.5 * (ys[:, None] - means[None]) ** 2 - 0.5 * math.log(2 * math.pi)
    return out


@criterion(15, "exponential-weights and log-loss regret bounds", 5)
def estimation_oracles():
    notes, ok = [], True
    for name, L in loss_streams().items():
        T, K = L.shape
        reg = exp_weights_regret(L, default_eta(K, T))
        bound = math.sqrt(T * math.log(K) / 2)
        ok &= reg <= bound
        notes.append(f"{name} {reg:.1f}/{bound:.1f}")
    for name, rows in density_streams().items():
        post = LogLossPosterior(rows.shape[1])
        for r in rows:
            post.update(r)
        bound = math.log(rows.shape[1])
        ok &= post.regret() <= bound + 1e-12
        notes.append(f"{name} {post.regret():.2f}/{bound:.2f}")
    return ok, "regret/bound: " + ", ".join(notes)
