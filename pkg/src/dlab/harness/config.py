"""Experiment configs: JSON documents with a schema version."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    env: dict
    algo: dict                      # {"name": ..., "params": {...}}
    T: int
    seeds: list = field(default_factory=lambda: [0])
    out: str | None = None
    convention: str | None = None   # "per-step" or "cumulative"; checked against the env when given
    name: str | None = None
    version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config version {self.version}; expected {SCHEMA_VERSION}")
        if not isinstance(self.env, dict) or "type" not in self.env:
            raise ConfigError("env must be a spec object with a 'type' field")
        if isinstance(self.algo, str):
            self.algo = {"name": self.algo}
        if "name" not in self.algo:
            raise ConfigError("algo must name an algorithm")
        self.algo.setdefault("params", {})
        if int(self.T) < 1:
            raise ConfigError("T must be at least 1")
        self.T = int(self.T)
        self.seeds = [int(s) for s in self.seeds]
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.convention not in (None, "per-step", "cumulative"):
            raise ConfigError(f"unknown convention {self.convention!r}")

    @property
    def key(self) -> str:
        return self.name or f"{self.env['type']}/{self.algo['name']}"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    known = set(ExperimentConfig.__dataclass_fields__)
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"{path}: unknown fields {sorted(extra)}")
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
