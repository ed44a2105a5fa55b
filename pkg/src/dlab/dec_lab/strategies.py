"""Closed-form exploration strategies with certified DEC payoffs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..contextual import igw
from ..numprob import g_optimal_design


def structured_payoffs(p, fclass, fhat, gamma: float) -> np.ndarray:
    """E_p[f(best_f) - f(pi) - gamma (f(pi) - fhat(pi))^2] for every row f of ``fclass``."""
    F = np.atleast_2d(np.asarray(fclass, dtype=float))
    G = F.max(axis=1, keepdims=True) - F - gamma * (F - np.asarray(fhat)) ** 2
    return G @ np.asarray(p)


def igw_dec_strategy(fhat, gamma: float) -> np.ndarray:
    """IGW with gap coefficient 4*gamma: exact minimizer of the unconstrained structured DEC."""
    return igw(fhat, gamma, coef=4.0).probs


def igw_equalizer_terms(fhat, gamma: float) -> np.ndarray:
    """E_p[fhat(b) - fhat(pi)] + 1/(4 gamma p(b)) for each candidate best decision b."""
    fhat = np.asarray(fhat, dtype=float)
    p = igw_dec_strategy(fhat, gamma)
    return fhat - p @ fhat + 1.0 / (4 * gamma * p)


@dataclass
class LinearStrategy:
    p: np.ndarray
    lam: float
    design: np.ndarray
    greedy: int


def linear_dec_strategy(fhat, features, gamma: float) -> LinearStrategy:
    """Design-based strategy for linear classes: reweight, mix with greedy, then normalize."""
    fhat = np.asarray(fhat, dtype=float)
    Phi = np.asarray(features, dtype=float)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n, d = Phi.shape
    greedy = int(np.argmax(fhat))
    gap = fhat[greedy] - fhat
    scale = gamma / d
    Phi_bar = Phi / np.sqrt(1 + scale * gap)[:, None]
    qbar = g_optimal_design(Phi_bar, tol=1e-6).design.probs
    q = 0.5 * qbar
    q[greedy] += 0.5

    def total(lam):
        return float(np.sum(q / (lam + scale * gap)))

    lo, hi = 0.5, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if total(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    lam = 0.5 * (lo + hi)
    p = q / (lam + scale * gap)
    return LinearStrategy(p / p.sum(), lam, qbar, greedy)


@dataclass
class LipschitzStrategy:
    p: np.ndarray
    cover: list
    eps: float

    def payoff_bound(self, gamma: float) -> float:
        return self.eps + len(self.cover) / gamma


def greedy_cover(dist, eps: float) -> list[int]:
    """Scan points in index order, keeping any point farther than eps from all kept ones."""
    D = np.asarray(dist, dtype=float)
    cover: list[int] = []
    for i in range(D.shape[0]):
        if all(D[i, j] > eps for j in cover):
            cover.append(i)
    return cover


def lipschitz_dec_strategy(fhat, dist, gamma: float, dim: int) -> LipschitzStrategy:
    fhat = np.asarray(fhat, dtype=float)
    eps = gamma ** (-1.0 / (dim + 1))
    cover = greedy_cover(dist, eps)
    p = np.zeros(fhat.size)
    p[cover] = igw_dec_strategy(fhat[cover], gamma)
    return LipschitzStrategy(p, cover, eps)


@dataclass
class CheatingStrategy:
    p: np.ndarray
    eps: float
    clipped: bool


def cheating_dec_strategy(fhat, gamma: float, A: int) -> CheatingStrategy:
    """(1 - eps) on the greedy arm of fhat, eps spread over the log2(A) cheat arms."""
    fhat = np.asarray(fhat, dtype=float)
    k = int(round(math.log2(A)))
    eps = 2 * k / gamma if gamma > 0 else math.inf
    clipped = eps > 1
    eps = min(eps, 1.0)
    p = np.zeros(A + k)
    p[int(np.argmax(fhat[:A]))] = 1 - eps
    p[A:] += eps / k
    return CheatingStrategy(p, eps, clipped)
