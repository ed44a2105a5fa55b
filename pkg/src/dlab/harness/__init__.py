from .config import SCHEMA_VERSION, ConfigError, ExperimentConfig, load_config
from .ledger import CSV_HEADER, RegretLedger, ledgers_to_csv, read_csv, write_atomic
from .registry import REGISTRY, UnknownAlgorithm, get_algorithm
from .run import run_experiment, run_seed
from .sweep import SweepRow, growth_exponent, summarize, sweep

__all__ = [
    "SCHEMA_VERSION", "ConfigError", "ExperimentConfig", "load_config",
    "CSV_HEADER", "RegretLedger", "ledgers_to_csv", "read_csv", "write_atomic",
    "REGISTRY", "UnknownAlgorithm", "get_algorithm",
    "run_experiment", "run_seed", "SweepRow", "growth_exponent", "summarize", "sweep",
]
