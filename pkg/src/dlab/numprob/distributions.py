"""Finite distributions, scalar reward laws and f-divergences."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

SUM_TOL = 1e-9

DivergenceKind = Literal["TV", "HellingerSq", "KL"]


class FiniteDist:
    """Probability vector over ``range(len(probs))``.

    Immutable; the underlying array is copied and marked read-only.
    """

    __slots__ = ("probs",)

    def __init__(self, probs, *, normalize: bool = False):
        p = np.array(probs, dtype=float).ravel()
        if p.size == 0:
            raise ValueError("empty support")
        if not np.all(np.isfinite(p)):
            raise ValueError("non-finite probabilities")
        if np.any(p < -SUM_TOL):
            raise ValueError("negative probability")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if normalize:
            if total <= 0:
                raise ValueError("cannot normalize a zero vector")
            p = p / total
        elif abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        self.probs = p

    @classmethod
    def uniform(cls, n: int) -> "FiniteDist":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, i: int) -> "FiniteDist":
        p = np.zeros(n)
        p[i] = 1.0
        return cls(p)

    @classmethod
    def from_log_weights(cls, logw) -> "FiniteDist":
        logw = np.asarray(logw, dtype=float)
        m = np.max(logw)
        if not np.isfinite(m):
            raise ValueError("all log-weights are -inf")
        w = np.exp(logw - m)
        return cls(w / w.sum())

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, i):
        return self.probs[i]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)

    def __repr__(self) -> str:
        return f"FiniteDist({np.array2string(self.probs, precision=4)})"

    def mean(self, values) -> float:
        return float(self.probs @ np.asarray(values, dtype=float))

    def sample(self, rng: np.random.Generator) -> int:
        # inverse-CDF with a single uniform keeps RNG consumption fixed per draw
        u = rng.random()
        idx = int(np.searchsorted(np.cumsum(self.probs), u, side="right"))
        return min(idx, self.probs.size - 1)


def _as_probs(p) -> np.ndarray:
    return p.probs if isinstance(p, FiniteDist) else np.asarray(p, dtype=float)


def tv(p, q) -> float:
    p, q = _as_probs(p), _as_probs(q)
    return 0.5 * float(np.abs(p - q).sum())


def hellinger_sq(p, q) -> float:
    """Squared Hellinger distance without the 1/2 factor, so values lie in [0, 2]."""
    p, q = _as_probs(p), _as_probs(q)
    return float(((np.sqrt(p) - np.sqrt(q)) ** 2).sum())


def kl(p, q) -> float:
    p, q = _as_probs(p), _as_probs(q)
    support = p > 0
    if np.any(q[support] <= 0):
        return math.inf
    ps, qs = p[support], q[support]
    return float(np.sum(ps * (np.log(ps) - np.log(qs))))


def divergence(kind: DivergenceKind, p, q) -> float:
    p, q = _as_probs(p), _as_probs(q)
    if p.shape != q.shape:
        raise ValueError(f"support size mismatch: {p.shape} vs {q.shape}")
    if kind == "TV":
        return tv(p, q)
    if kind == "HellingerSq":
        return hellinger_sq(p, q)
    if kind == "KL":
        return kl(p, q)
    raise ValueError(f"unknown divergence kind {kind!r}")


def hellinger_sq_gaussian(mu1: float, mu2: float) -> float:
    """Closed form ``1 - exp(-(mu1 - mu2)^2 / 8)`` for unit-variance Gaussians.

    This is the half-normalized value (range [0, 1]); the integral without the
    1/2 factor is exactly twice this.
    """
    return -math.expm1(-((mu1 - mu2) ** 2) / 8.0)


def kl_hellinger_ratio_bound(p, q) -> tuple[float, float]:
    """Return ``(KL(p||q), (2 + log V) * Hel^2(p, q))`` with V the max density ratio.

    Exposed for inspecting the bounded-ratio inequality; nothing downstream uses it.
    """
    p, q = _as_probs(p), _as_probs(q)
    support = p > 0
    if np.any(q[support] <= 0):
        return math.inf, math.inf
    ratio = float(np.max(p[support] / q[support]))
    return kl(p, q), (2.0 + math.log(max(ratio, 1.0))) * hellinger_sq(p, q)


@dataclass(frozen=True)
class RewardDist:
    """Scalar reward law. Gaussians always have unit variance."""

    kind: Literal["gaussian", "bernoulli", "point"]
    mean: float

    def __post_init__(self):
        if self.kind not in ("gaussian", "bernoulli", "point"):
            raise ValueError(f"unknown reward kind {self.kind!r}")
        if self.kind == "bernoulli" and not (0.0 <= self.mean <= 1.0):
            raise ValueError("Bernoulli mean must lie in [0, 1]")

    def sample(self, rng: np.random.Generator) -> float:
        # one normal and one uniform per draw regardless of kind -> stable streams
        z = rng.standard_normal()
        u = rng.random()
        if self.kind == "gaussian":
            return self.mean + z
        if self.kind == "bernoulli":
            return 1.0 if u < self.mean else 0.0
        return self.mean

    def log_density(self, r: float) -> float:
        if self.kind == "gaussian":
            return -0.5 * (r - self.mean) ** 2 - 0.5 * math.log(2 * math.pi)
        if self.kind == "bernoulli":
            pr = self.mean if r >= 0.5 else 1.0 - self.mean
            return math.log(pr) if pr > 0 else -math.inf
        return 0.0 if r == self.mean else -math.inf

    def hellinger_sq(self, other: "RewardDist") -> float:
        if self.kind != other.kind:
            raise ValueError("Hellinger between different reward kinds is not supported")
        if self.kind == "gaussian":
            return hellinger_sq_gaussian(self.mean, other.mean)
        if self.kind == "bernoulli":
            return hellinger_sq([self.mean, 1 - self.mean], [other.mean, 1 - other.mean])
        return 0.0 if self.mean == other.mean else 2.0


def gaussian(mean: float) -> RewardDist:
    return RewardDist("gaussian", float(mean))


def bernoulli(mean: float) -> RewardDist:
    return RewardDist("bernoulli", float(mean))


def point(value: float) -> RewardDist:
    return RewardDist("point", float(value))
