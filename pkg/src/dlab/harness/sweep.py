"""Many configs at once, summarized by medians, quartiles and a growth exponent."""
from __future__ import annotations

import csv
import io
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .ledger import fmt
from .run import run_experiment

SUMMARY_HEADER = ("config", "status", "median", "q25", "q75", "exponent", "error")


def growth_exponent(curve) -> float:
    """Slope of log cumulative regret against log t at t = T/4, T/2 and T."""
    c = np.asarray(curve, dtype=float)
    T = c.size
    ts = np.array([max(T // 4, 1), max(T // 2, 1), T])
    ys = c[ts - 1]
    if np.any(ys <= 0):
        return float("nan")
    slope, _ = np.polyfit(np.log(ts), np.log(ys), 1)
    return float(slope)


@dataclass
class SweepRow:
    config: str
    status: str
    median: float = float("nan")
    q25: float = float("nan")
    q75: float = float("nan")
    exponent: float = float("nan")
    error: str = ""


def summarize(name: str, ledgers) -> SweepRow:
    curves = np.stack([led.cum for led in ledgers])
    finals = curves[:, -1]
    q25, med, q75 = np.percentile(finals, [25, 50, 75])
    return SweepRow(name, "ok", float(med), float(q25), float(q75), growth_exponent(np.median(curves, axis=0)))


def _one(config: ExperimentConfig) -> SweepRow:
    try:
        return summarize(config.key, run_experiment(config))
    except Exception as exc:  # reported per config; the sweep carries on
        return SweepRow(config.key, "failed", error=f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=2)}")


def sweep(configs, jobs: int = 1) -> list[SweepRow]:
    configs = list(configs)
    if jobs <= 1 or len(configs) <= 1:
        return [_one(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_one, configs))


def summary_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for r in rows:
        w.writerow((r.config, r.status, fmt(r.median), fmt(r.q25), fmt(r.q75), fmt(r.exponent),
                    r.error.splitlines()[0] if r.error else ""))
    return buf.getvalue()
