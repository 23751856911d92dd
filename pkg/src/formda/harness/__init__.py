"""Configuration, experiment orchestration, persistence and the CLI."""

from .config import PROBLEMS, ConfigError, ConfigReport, ExperimentConfig, load_config, parse_config, validate_config
from .io import aggregate_rows, read_aggregate_csv, read_run_csv, write_aggregate_csv, write_run_csv
from .props import PropertyReport, property_suite
from .runner import ExperimentSummary, run_experiment

__all__ = [
    "PROBLEMS",
    "ConfigError",
    "ConfigReport",
    "ExperimentConfig",
    "ExperimentSummary",
    "PropertyReport",
    "aggregate_rows",
    "load_config",
    "parse_config",
    "property_suite",
    "read_aggregate_csv",
    "read_run_csv",
    "run_experiment",
    "validate_config",
    "write_aggregate_csv",
    "write_run_csv",
]
