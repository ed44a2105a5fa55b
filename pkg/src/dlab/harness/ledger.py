"""Regret ledgers and their CSV form."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_HEADER = ("t", "inst_regret", "cum_regret", "reward", "seed", "algo", "env")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class RegretLedger:
    seed: int
    algo: str
    env: str
    inst: list = field(default_factory=list)
    reward: list = field(default_factory=list)

    def add(self, inst_regret: float, reward: float) -> None:
        self.inst.append(float(inst_regret))
        self.reward.append(float(reward))

    @property
    def cum(self) -> np.ndarray:
        return np.cumsum(self.inst)

    @property
    def total(self) -> float:
        return float(self.cum[-1]) if self.inst else 0.0

    def rows(self):
        for t, (i, c, r) in enumerate(zip(self.inst, self.cum, self.reward), start=1):
            yield (t, fmt(i), fmt(c), fmt(r), self.seed, self.algo, self.env)


def ledgers_to_csv(ledgers) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for led in ledgers:
        w.writerows(led.rows())
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path) -> dict[int, RegretLedger]:
    """Ledgers keyed by seed, rebuilt from a CSV written by ``ledgers_to_csv``."""
    out: dict[int, RegretLedger] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        for row in reader:
            seed = int(row["seed"])
            led = out.setdefault(seed, RegretLedger(seed, row["algo"], row["env"]))
            led.add(float(row["inst_regret"]), float(row["reward"]))
    return out
