"""Exact eluder dimension for small finite classes.

A repeated decision can never be surprising (its earlier copy already
violates the fit condition), so only sets of distinct decisions matter, and
whether a point can extend a prefix depends on the prefix only as a set. The
search therefore grows reachable subsets level by level.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DECISIONS = 14


@dataclass
class EluderResult:
    value: int
    witness_eps: float
    flagged: bool = False


def _subset_sums(sqdev: np.ndarray) -> np.ndarray:
    """fit[mask, k] = sum over pi in mask of sqdev[k, pi]."""
    K, n = sqdev.shape
    masks = np.arange(1 << n)
    bits = (masks[:, None] >> np.arange(n)) & 1
    return bits @ sqdev.T


def _longest(fit: np.ndarray, dev_ok: np.ndarray, limit: float, strict: bool, n: int) -> int:
    fits = fit < limit if strict else fit <= limit + 1e-15
    # extend[mask, pi]: some member fits the prefix set and is surprising at pi
    extend = (fits.astype(np.int32) @ dev_ok.astype(np.int32)) > 0
    frontier = np.array([0])
    depth = 0
    pis = np.arange(n)
    while frontier.size:
        ok = extend[frontier] & (((frontier[:, None] >> pis) & 1) == 0)
        rows, cols = np.nonzero(ok)
        if rows.size == 0:
            break
        frontier = np.unique(frontier[rows] | (1 << cols))
        depth += 1
    return depth


def eluder_dimension(values, eps: float, fstar=None) -> EluderResult:
    """``values[k, pi]`` is member k at decision pi; ``fstar`` a vector or member index.

    When ``fstar`` is None the maximum over members of the class is returned.
    """
    F = np.atleast_2d(np.asarray(values, dtype=float))
    n = F.shape[1]
    if n > MAX_DECISIONS:
        raise ValueError(f"exhaustive mode supports at most {MAX_DECISIONS} decisions")
    if fstar is None:
        results = [eluder_dimension(F, eps, F[k]) for k in range(F.shape[0])]
        return max(results, key=lambda r: r.value)
    fs = F[int(fstar)] if np.isscalar(fstar) else np.asarray(fstar, dtype=float)
    dev = np.abs(F - fs)
    fit = _subset_sums(dev ** 2)
    best = _longest(fit, dev > eps, eps ** 2, False, n)
    where = float(eps)
    # the sup over eps' >= eps can only change as eps' rises to a deviation value
    colmax = dev.max(axis=0)
    for d in np.unique(dev[dev > eps])[::-1]:
        if int(np.sum(colmax >= d)) <= best:
            continue  # not enough surprisable decisions left to beat the current best
        v = _longest(fit, dev >= d, d ** 2, True, n)
        if v > best:
            best, where = v, float(d)
    return EluderResult(max(best, 1), where, False)
