"""Contextual bandits on top of regression oracles: IGW, SquareCB, epsilon-greedy, LinUCB."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bandits import Learner, point_mass
from .estimators import SquareLossOracle, least_squares_finite

IGW_TOL = 1e-10


@dataclass(frozen=True)
class IgwDistribution:
    probs: np.ndarray
    lam: float


def igw(values, gamma: float, coef: float = 2.0) -> IgwDistribution:
    """Inverse gap weighting: p(a) = 1 / (lam + coef * gamma * gap(a)).

    ``coef=2`` is the usual definition; ``coef=4`` reproduces the exact
    minimizer of the structured-bandit offset DEC at scale ``gamma``.
    """
    f = np.asarray(values, dtype=float)
    A = f.size
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0 or A == 1:
        return IgwDistribution(np.full(A, 1.0 / A), float(A))
    gap = coef * gamma * (f.max() - f)

    def total(lam):
        return float(np.sum(1.0 / (lam + gap)))

    lo, hi = 1.0, float(A)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if total(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < IGW_TOL * 1e-2:
            break
    lam = 0.5 * (lo + hi)
    p = 1.0 / (lam + gap)
    return IgwDistribution(p, lam)


def squarecb_act(fhat, gamma: float, coef: float = 2.0) -> np.ndarray:
    return igw(fhat, gamma, coef).probs


def squarecb_gamma(T: int, A: int, est: float) -> float:
    return math.sqrt(T * A / est)


def igw_round_gap(fhat, fstar, gamma: float) -> tuple[float, float]:
    """Both sides of the per-round IGW inequality for p = IGW(fhat, gamma).

    Returns (E_p[f*(best) - f*(a)], A/gamma + gamma * E_p[(fhat - f*)^2]).
    """
    fhat = np.asarray(fhat, dtype=float)
    fstar = np.asarray(fstar, dtype=float)
    p = igw(fhat, gamma).probs
    lhs = float(fstar.max() - p @ fstar)
    rhs = fhat.size / gamma + gamma * float(p @ (fhat - fstar) ** 2)
    return lhs, rhs


def epoch_schedule(T: int) -> list[tuple[int, int, int]]:
    """Epochs as (m, first_round, last_round), 1-based and inclusive.

    Round 1 is epoch 0; epoch m >= 1 covers 2^(m-1)+1 .. 2^m, truncated at T.
    """
    if T < 2:
        raise ValueError("T must be at least 2")
    out = [(0, 1, 1)]
    m = 1
    while 2 ** (m - 1) < T:
        out.append((m, 2 ** (m - 1) + 1, min(2 ** m, T)))
        m += 1
    return out


def epoch_gammas(T: int, A: int, est_off) -> list[float]:
    """gamma_m = sqrt(A T / est_off(tau_{m-1})) for each epoch m >= 1."""
    return [math.sqrt(A * T / est_off(2 ** (m - 1))) for m, _, _ in epoch_schedule(T)[1:]]


def eps_greedy_cb_act(fhat, eps: float, A: int) -> np.ndarray:
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    return (1 - eps) * point_mass(A, int(np.argmax(fhat))) + eps / A


# ---------------------------------------------------------------- learners

class SquareCB(Learner):
    """IGW over an online square-loss oracle on a finite class ``fclass[k, x, a]``."""

    name = "squarecb"

    def __init__(self, fclass, T: int, delta: float = 0.1, gamma: float | None = None,
                 oracle_mode: str = "square"):
        self.oracle = SquareLossOracle(fclass, mode=oracle_mode)
        K, _, A = self.oracle.fclass.shape
        self.A = A
        self.gamma = squarecb_gamma(T, A, math.log(K / delta)) if gamma is None else gamma
        self.last_fhat = None

    def act(self, context=0):
        self.last_fhat = self.oracle.predict(context)
        return igw(self.last_fhat, self.gamma).probs

    def observe(self, context, action, reward, p=None):
        self.oracle.update(context, action, reward)


class EpsGreedyCB(Learner):
    name = "eps_greedy_cb"

    def __init__(self, fclass, T: int, delta: float = 0.1, eps: float | None = None,
                 oracle_mode: str = "square"):
        self.oracle = SquareLossOracle(fclass, mode=oracle_mode)
        K, _, A = self.oracle.fclass.shape
        self.A = A
        self.eps = min(1.0, (A * math.log(K / delta) / T) ** (1 / 3)) if eps is None else eps
        self.last_fhat = None

    def act(self, context=0):
        self.last_fhat = self.oracle.predict(context)
        return eps_greedy_cb_act(self.last_fhat, self.eps, self.A)

    def observe(self, context, action, reward, p=None):
        self.oracle.update(context, action, reward)


class EpochSquareCB(Learner):
    """SquareCB with an offline least-squares oracle refit once per doubling epoch.

    The fit used in epoch m reads only the rounds of epoch m-1; ``fit_log``
    records (epoch, first_round, last_round) of the data behind each fit.
    """

    name = "epoch_squarecb"

    def __init__(self, fclass, T: int, delta: float = 0.1, est_off=None):
        F = np.asarray(fclass, dtype=float)
        self.F = F[:, None, :] if F.ndim == 2 else F
        K, _, self.A = self.F.shape
        est_off = est_off or (lambda n: math.log(K / delta))
        self.epochs = epoch_schedule(T)
        self.gammas = [0.0] + epoch_gammas(T, self.A, est_off)
        self.t = 0
        self.m = 0
        self.fhat_index: int | None = None
        self.data: list[tuple[int, int, int, float]] = []  # (t, x, a, r)
        self.fit_log: list[tuple[int, int, int]] = []

    def _epoch_of(self, t: int) -> int:
        for m, lo, hi in self.epochs:
            if lo <= t <= hi:
                return m
        return self.epochs[-1][0]

    def _refit(self, m: int) -> None:
        _, lo, hi = self.epochs[m - 1]
        rows = [d for d in self.data if lo <= d[0] <= hi]
        preds = np.array([[self.F[k, x, a] for _, x, a, _ in rows] for k in range(self.F.shape[0])])
        self.fhat_index = least_squares_finite(preds.reshape(self.F.shape[0], len(rows)), [r for *_, r in rows])
        self.fit_log.append((m, lo, hi))

    def act(self, context=0):
        t = self.t + 1
        m = self._epoch_of(t)
        if m != self.m:
            self.m = m
            self._refit(m)
        if m == 0:
            return np.full(self.A, 1.0 / self.A)
        return igw(self.F[self.fhat_index, context], self.gammas[m]).probs

    def observe(self, context, action, reward, p=None):
        self.t += 1
        self.data.append((self.t, context, action, float(reward)))


class LinUCB(Learner):
    """Optimistic linear contextual bandit.

    Features come from ``features[x]`` with shape (A, d). The estimate is the
    least-squares member of a finite parameter list when ``thetas`` is given,
    otherwise ridge regression projected onto the unit ball.
    """

    name = "linucb"

    def __init__(self, features, beta: float | None = None, thetas=None, delta: float = 0.1):
        self.features = np.asarray(features, dtype=float)
        if self.features.ndim == 2:
            self.features = self.features[None]
        self.d = self.features.shape[-1]
        self.thetas = None if thetas is None else np.asarray(thetas, dtype=float)
        if beta is None:
            if self.thetas is None:
                raise ValueError("beta is required for the ridge estimator")
            beta = 8.0 * math.log(self.thetas.shape[0] / delta)
        self.beta = float(beta)
        self.radius = math.sqrt(16 * self.beta + 4)
        self.Sigma = np.eye(self.d)
        self.b = np.zeros(self.d)
        self.sq_loss = None if self.thetas is None else np.zeros(self.thetas.shape[0])
        self.potential: list[float] = []

    @property
    def theta_hat(self) -> np.ndarray:
        if self.thetas is not None:
            return self.thetas[int(np.argmin(self.sq_loss))]
        th = np.linalg.solve(self.Sigma, self.b)
        n = np.linalg.norm(th)
        return th / n if n > 1 else th

    def scores(self, context=0) -> np.ndarray:
        phis = self.features[context]
        Sinv = np.linalg.inv(self.Sigma)
        width = np.sqrt(np.einsum("ad,de,ae->a", phis, Sinv, phis))
        return phis @ self.theta_hat + self.radius * width

    def act(self, context=0):
        return point_mass(self.features.shape[1], int(np.argmax(self.scores(context))))

    def observe(self, context, action, reward, p=None):
        phi = self.features[context, action]
        self.potential.append(float(phi @ np.linalg.solve(self.Sigma, phi)))
        self.Sigma += np.outer(phi, phi)
        self.b += reward * phi
        if self.thetas is not None:
            self.sq_loss += (self.thetas @ phi - reward) ** 2

    def confidence_ok(self, theta_star) -> bool:
        diff = self.theta_hat - np.asarray(theta_star)
        return float(diff @ self.Sigma @ diff) <= 16 * self.beta + 4

    def potential_ok(self) -> tuple[float, float]:
        T = len(self.potential)
        return float(sum(self.potential)), 2 * self.d * math.log(1 + T / self.d)
