"""Bandit-style environments: multi-armed, contextual and structured."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..numprob import FiniteDist, RewardDist, gaussian, bernoulli

PER_STEP = "per-step"


@dataclass(frozen=True)
class BanditEnv:
    arms: tuple[RewardDist, ...]
    convention: str = PER_STEP

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))
        if not self.arms:
            raise ValueError("a bandit needs at least one arm")

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> np.ndarray:
        return np.array([a.mean for a in self.arms])

    @property
    def optimal_arm(self) -> int:
        return int(np.argmax(self.means))  # argmax breaks ties toward index 0

    @property
    def optimal_mean(self) -> float:
        return float(self.means.max())

    def gaps(self) -> np.ndarray:
        return self.optimal_mean - self.means

    def expected_regret(self, p) -> float:
        return float(np.asarray(p, dtype=float) @ self.gaps())

    def pull(self, arm: int, rng: np.random.Generator) -> float:
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} out of range for {self.n_arms} arms")
        return self.arms[arm].sample(rng)


def gaussian_bandit(means) -> BanditEnv:
    return BanditEnv(tuple(gaussian(m) for m in means))


def bernoulli_bandit(means) -> BanditEnv:
    return BanditEnv(tuple(bernoulli(m) for m in means))


def bandit_from_means(means, noise: str = "gaussian") -> BanditEnv:
    return BanditEnv(tuple(RewardDist(noise, float(m)) for m in means))


@dataclass(frozen=True)
class ContextualEnv:
    """Finite contexts drawn i.i.d.; mean table ``means[x, a]`` in [0, 1]."""

    context_dist: FiniteDist
    means: np.ndarray
    noise: str = "gaussian"
    features: np.ndarray | None = None  # optional (X, A, d) embedding
    convention: str = PER_STEP

    def __post_init__(self):
        m = np.array(self.means, dtype=float)
        if m.ndim != 2 or m.shape[0] != len(self.context_dist):
            raise ValueError("means must be (n_contexts, n_actions)")
        if np.any(m < 0) or np.any(m > 1):
            raise ValueError("contextual means must lie in [0, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "means", m)

    @property
    def n_actions(self) -> int:
        return self.means.shape[1]

    def optimal_action(self, x: int) -> int:
        return int(np.argmax(self.means[x]))

    def expected_regret(self, x: int, p) -> float:
        row = self.means[x]
        return float(row.max() - np.asarray(p) @ row)

    def sample_context(self, rng: np.random.Generator) -> int:
        return self.context_dist.sample(rng)

    def pull(self, x: int, a: int, rng: np.random.Generator) -> float:
        if not 0 <= a < self.n_actions:
            raise IndexError(f"action {a} out of range")
        return RewardDist(self.noise, float(self.means[x, a])).sample(rng)


@dataclass(frozen=True)
class StructuredEnv:
    """Finite decision set with a declared finite function class containing the truth.

    ``fclass[k, pi]`` is the mean of decision ``pi`` under member ``k``.
    """

    fclass: np.ndarray
    true_index: int
    noise: str = "gaussian"
    features: np.ndarray | None = None
    convention: str = PER_STEP

    def __post_init__(self):
        F = np.array(self.fclass, dtype=float)
        if F.ndim != 2:
            raise ValueError("fclass must be (n_functions, n_decisions)")
        if not 0 <= self.true_index < F.shape[0]:
            raise ValueError("true_index outside the class")
        F.setflags(write=False)
        object.__setattr__(self, "fclass", F)

    @property
    def means(self) -> np.ndarray:
        return self.fclass[self.true_index]

    @property
    def n_decisions(self) -> int:
        return self.fclass.shape[1]

    def bandit(self) -> BanditEnv:
        return bandit_from_means(self.means, self.noise)

    def model(self, k: int) -> BanditEnv:
        return bandit_from_means(self.fclass[k], self.noise)

    def with_truth(self, k: int) -> "StructuredEnv":
        return StructuredEnv(self.fclass, k, self.noise, self.features, self.convention)


def _is_pow2(a: int) -> bool:
    return a >= 2 and (a & (a - 1)) == 0


def cheat_bits(i: int, A: int) -> np.ndarray:
    """Binary encoding of arm ``i`` (0-based), most significant bit first."""
    k = int(math.log2(A))
    return np.array([(i >> (k - 1 - j)) & 1 for j in range(k)], dtype=float)


def cheating_code(A: int, noise: str = "gaussian") -> tuple[list[BanditEnv], StructuredEnv]:
    """Model class over ``A + log2(A)`` decisions and a structured env (truth = model 0).

    Model i pays 3/4 on arm i and 1/2 on the other regular arms; cheat arm j
    has mean ``-bit_j(i)``.
    """
    if not _is_pow2(int(A)):
        raise ValueError(f"A must be a power of two >= 2, got {A}")
    k = int(math.log2(A))
    F = np.full((A, A + k), 0.5)
    for i in range(A):
        F[i, i] = 0.75
        F[i, A:] = -cheat_bits(i, A)
    models = [bandit_from_means(F[i], noise) for i in range(A)]
    return models, StructuredEnv(F, 0, noise)


def decode_cheat(readout, A: int) -> int:
    """Invert the cheat-arm means back to the model index."""
    bits = (-np.asarray(readout) > 0.5).astype(int)
    return int("".join(map(str, bits)), 2) if bits.size else 0


def linear_structured(features, thetas, true_index: int = 0, noise: str = "gaussian") -> StructuredEnv:
    """Linear class f_theta(pi) = <theta, phi(pi)> for a finite list of parameters."""
    Phi = np.asarray(features, dtype=float)
    Th = np.atleast_2d(np.asarray(thetas, dtype=float))
    if np.any(np.linalg.norm(Phi, axis=1) > 1 + 1e-12):
        raise ValueError("feature norms must be at most 1")
    if np.any(np.linalg.norm(Th, axis=1) > 1 + 1e-12):
        raise ValueError("parameter norms must be at most 1")
    return StructuredEnv(Th @ Phi.T, true_index, noise, Phi)


def random_contextual(n_contexts: int, n_actions: int, rng: np.random.Generator,
                      noise: str = "gaussian") -> ContextualEnv:
    return ContextualEnv(FiniteDist.uniform(n_contexts), rng.random((n_contexts, n_actions)), noise)


def linear_contextual(features, theta, context_dist=None, noise: str = "gaussian") -> ContextualEnv:
    """Contextual env with means <theta, phi(x, a)>; features shaped (X, A, d)."""
    Phi = np.asarray(features, dtype=float)
    means = Phi @ np.asarray(theta, dtype=float)
    ctx = context_dist or FiniteDist.uniform(Phi.shape[0])
    return ContextualEnv(ctx, means, noise, Phi)
