"""Online estimation oracles over finite classes.

Exponential weights for square and log loss, finite-class least squares,
square-loss confidence sets and a layer-wise tabular MDP estimator. Each
oracle can feed an :class:`EstimationLedger` with its exact per-round error.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .numprob import FiniteDist, hellinger_sq
from .envs.mdp import TabularMDP

MIX_GRID = np.linspace(0.0, 1.0, 10_001)  # 1e-4 resolution
SQUARE_MIX_ETA = 2.0


class PosteriorCollapse(RuntimeError):
    """Every model in the class was excluded by the data."""


@dataclass
class EstimationLedger:
    terms: list = field(default_factory=list)

    def add(self, value: float) -> None:
        if value < 0 or not np.isfinite(value):
            raise ValueError(f"estimation error term must be finite and nonnegative, got {value}")
        self.terms.append(float(value))

    @property
    def total(self) -> float:
        return float(math.fsum(self.terms))

    def __len__(self) -> int:
        return len(self.terms)


# ---------------------------------------------------------------- exp weights

def _log_prior(prior) -> np.ndarray:
    with np.errstate(divide="ignore"):  # zero prior mass excludes a member
        return np.log(np.asarray(prior, dtype=float))


@dataclass(frozen=True)
class ExpWeightsState:
    logw: np.ndarray
    eta: float
    cum_loss: np.ndarray

    @classmethod
    def init(cls, n: int, eta: float, prior=None) -> "ExpWeightsState":
        if eta <= 0:
            raise ValueError("learning rate must be positive")
        logw = np.zeros(n) if prior is None else _log_prior(prior)
        return cls(logw, float(eta), np.zeros(n))

    def dist(self) -> FiniteDist:
        return FiniteDist.from_log_weights(self.logw)

    def __len__(self) -> int:
        return self.logw.size


def exp_weights_update(state: ExpWeightsState, losses) -> ExpWeightsState:
    loss = np.asarray(losses, dtype=float)
    if loss.shape != state.logw.shape:
        raise ValueError("loss vector length does not match the class")
    if np.any(np.isnan(loss)):
        raise ValueError("NaN loss")
    logw = state.logw - state.eta * loss
    finite = logw[np.isfinite(logw)]
    if finite.size:
        logw = logw - finite.max()  # keep the top weight at log 1
    return replace(state, logw=logw, cum_loss=state.cum_loss + loss)


def exp_weights_regret(losses, eta: float) -> float:
    """Expected-loss regret of the randomized variant against the best fixed member."""
    L = np.asarray(losses, dtype=float)
    st = ExpWeightsState.init(L.shape[1], eta)
    total = 0.0
    for row in L:
        total += st.dist().mean(row)
        st = exp_weights_update(st, row)
    return total - float(L.sum(axis=0).min())


def default_eta(n_members: int, T: int) -> float:
    return math.sqrt(8 * math.log(max(n_members, 2)) / T)


def mixability_substitution(q, preds, eta: float = SQUARE_MIX_ETA, grid=MIX_GRID) -> float:
    """Minimize over the grid the worst case over y in {0, 1} of the mixability gap."""
    q = np.asarray(q, dtype=float)
    preds = np.asarray(preds, dtype=float)
    a = []
    for y in (0.0, 1.0):
        z = -eta * (preds - y) ** 2
        m = z.max()
        a.append((m + math.log(float(q @ np.exp(z - m)))) / eta)
    worst = np.maximum(grid ** 2 + a[0], (1.0 - grid) ** 2 + a[1])
    return float(grid[int(np.argmin(worst))])


def averaged_prediction(state: ExpWeightsState, preds, mode: str = "square", y=None) -> float:
    """Aggregate member predictions under the current weights.

    mode ``square``: mixability substitution; ``mean``: posterior mean;
    ``log``: mixture density of ``y`` where ``preds`` are member probabilities of y=1
    (or member densities already evaluated at the outcome when ``y`` is None).
    """
    preds = np.asarray(preds, dtype=float)
    if preds.size == 0:
        raise ValueError("empty class")
    q = state.dist().probs
    if mode == "square":
        return mixability_substitution(q, preds)
    if mode == "mean":
        return float(q @ preds)
    if mode == "log":
        dens = preds if y is None else (preds if y >= 0.5 else 1.0 - preds)
        return float(q @ dens)
    raise ValueError(f"unknown mode {mode!r}")


class SquareLossOracle:
    """Online regression over a finite class of tables ``fclass[k, x, a]``."""

    def __init__(self, fclass, mode: str = "square", eta: float = SQUARE_MIX_ETA):
        F = np.asarray(fclass, dtype=float)
        if F.ndim == 2:
            F = F[:, None, :]
        if F.shape[0] == 0:
            raise ValueError("empty class")
        self.fclass = F
        self.mode = mode
        self.state = ExpWeightsState.init(F.shape[0], eta)
        self.ledger = EstimationLedger()

    def predict(self, x: int) -> np.ndarray:
        q = self.state.dist().probs
        cols = self.fclass[:, x, :]
        if self.mode == "mean":
            return q @ cols
        return np.array([mixability_substitution(q, cols[:, a], self.state.eta) for a in range(cols.shape[1])])

    def update(self, x: int, a: int, r: float) -> None:
        losses = (self.fclass[:, x, a] - float(np.clip(r, 0.0, 1.0))) ** 2
        self.state = exp_weights_update(self.state, losses)

    def record_error(self, fhat, ftrue, p) -> float:
        term = float(np.asarray(p) @ (np.asarray(fhat) - np.asarray(ftrue)) ** 2)
        self.ledger.add(term)
        return term


# ---------------------------------------------------------------- least squares

def least_squares_finite(preds, rewards) -> int:
    """Index of the empirical square-loss minimizer; ``preds[k, i] = f_k(x_i, pi_i)``."""
    P = np.asarray(preds, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("empty function class")
    r = np.asarray(rewards, dtype=float)
    if r.size == 0:
        warnings.warn("least squares on empty data: returning member 0", RuntimeWarning, stacklevel=2)
        return 0
    return int(np.argmin(((P - r[None, :]) ** 2).sum(axis=1)))


def square_losses(preds, rewards) -> np.ndarray:
    P = np.asarray(preds, dtype=float)
    r = np.asarray(rewards, dtype=float)
    if r.size == 0:
        return np.zeros(P.shape[0])
    return ((P - r[None, :]) ** 2).sum(axis=1)


def confidence_radius(n_members: int, delta: float) -> float:
    return 8.0 * math.log(n_members / delta)


@dataclass(frozen=True)
class ConfidenceSet:
    members: np.ndarray  # boolean mask
    beta: float

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.members)

    def __len__(self) -> int:
        return int(self.members.sum())


def confidence_set(preds, rewards, beta: float) -> ConfidenceSet:
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    L = square_losses(preds, rewards)
    return ConfidenceSet(L <= L.min() + beta, float(beta))


# ---------------------------------------------------------------- log loss

class LogLossPosterior:
    """Exponential weights with unit learning rate on log loss (a Bayes posterior)."""

    def __init__(self, n_models: int, prior=None):
        self.logw = np.zeros(n_models) if prior is None else _log_prior(prior)
        self.cum_logloss = np.zeros(n_models)
        self.mixture_logloss = 0.0
        self.ledger = EstimationLedger()

    def dist(self) -> FiniteDist:
        if not np.any(np.isfinite(self.logw)):
            raise PosteriorCollapse("all models excluded")
        return FiniteDist.from_log_weights(self.logw)

    def update(self, log_densities) -> None:
        ld = np.asarray(log_densities, dtype=float)
        q = self.dist().probs
        m = ld[q > 0].max() if np.any(q > 0) else -np.inf
        if not np.isfinite(m):
            self.logw = np.full_like(self.logw, -np.inf)
            raise PosteriorCollapse("observation has zero density under every model")
        self.mixture_logloss -= m + math.log(float(q @ np.exp(np.where(np.isfinite(ld), ld - m, -np.inf))))
        self.cum_logloss -= ld
        self.logw = self.logw + ld
        top = self.logw[np.isfinite(self.logw)].max()
        self.logw = self.logw - top

    def regret(self) -> float:
        """Mixture log loss minus best model's, both cumulative."""
        return self.mixture_logloss - float(self.cum_logloss.min())


def log_loss_posterior(log_density_rows, prior=None) -> FiniteDist:
    """Posterior after a batch of per-round log-density vectors (rows: rounds, cols: models)."""
    rows = np.atleast_2d(np.asarray(log_density_rows, dtype=float))
    post = LogLossPosterior(rows.shape[1], prior)
    for r in rows:
        post.update(r)
    return post.dist()


# ---------------------------------------------------------------- MDP estimation

class LayerwiseEstimator:
    """Per-layer estimation of transition kernels.

    ``frequency`` mode keeps counts; ``posterior`` mode runs a log-loss posterior
    over a finite list of candidate kernels for every layer (``kernels[h][k]`` is
    an ``(S, A, S)`` array) and reports the posterior-mean kernel, which is a
    valid transition table.
    """

    def __init__(self, S: int, A: int, H: int, R, d1=None, kernels=None, mode: str = "frequency"):
        self.S, self.A, self.H = S, A, H
        self.R = np.asarray(R, dtype=float)
        self.d1 = np.full(S, 1.0 / S) if d1 is None else np.asarray(d1, dtype=float)
        self.mode = mode
        self.counts = np.zeros((H, S, A, S))
        if mode == "posterior":
            if kernels is None:
                raise ValueError("posterior mode needs candidate kernels per layer")
            self.kernels = [np.asarray(k, dtype=float) for k in kernels]
            self.posts = [LogLossPosterior(k.shape[0]) for k in self.kernels]
        elif mode != "frequency":
            raise ValueError(f"unknown mode {mode!r}")
        self.layer_ledgers = [EstimationLedger() for _ in range(H)]

    def estimate(self) -> TabularMDP:
        if self.mode == "frequency":
            P = np.where(self.counts.sum(-1, keepdims=True) > 0,
                         self.counts / np.maximum(self.counts.sum(-1, keepdims=True), 1), 1.0 / self.S)
        else:
            P = np.stack([np.einsum("k,ksat->sat", post.dist().probs, K)
                          for post, K in zip(self.posts, self.kernels)])
        return TabularMDP(P, self.R, self.d1)

    def record_error(self, true_mdp: TabularMDP, occupancy_states) -> None:
        """Add E_{(s,a) ~ d_h}[Hel^2(P*_h(s,a), Phat_h(s,a))] for each layer."""
        est = self.estimate()
        for h in range(self.H):
            d = occupancy_states[h]
            term = 0.0
            for s, a in zip(*np.nonzero(d > 0)):
                term += d[s, a] * hellinger_sq(true_mdp.P[h, s, a], est.P[h, s, a])
            self.layer_ledgers[h].add(term)

    def update(self, trajectory) -> None:
        s, a = trajectory.states, trajectory.actions
        for h in range(self.H - 1):
            self.counts[h, s[h], a[h], s[h + 1]] += 1
            if self.mode == "posterior":
                K = self.kernels[h]
                with np.errstate(divide="ignore"):
                    self.posts[h].update(np.log(K[:, s[h], a[h], s[h + 1]]))

    @property
    def visited(self) -> np.ndarray:
        return self.counts.sum(-1) > 0


def layerwise_mdp_estimator(trajectories, S: int, A: int, H: int, R, d1=None,
                            kernels=None, mode: str = "frequency") -> TabularMDP:
    est = LayerwiseEstimator(S, A, H, R, d1, kernels, mode)
    for tr in trajectories:
        est.update(tr)
    return est.estimate()
