"""Data ingestion, model files, experiments, sweeps, reports and the CLI."""

from .data import ingest_basket, ingest_series, synthetic_series, write_series
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    SweepRecord,
    SweepReport,
    run_experiment,
    sweep,
)
from .modelio import load_model, save_model
from .report import render
from .sweepfile import load_sweep_config, parse_sweep_config

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "SweepRecord",
    "SweepReport",
    "ingest_basket",
    "ingest_series",
    "load_model",
    "load_sweep_config",
    "parse_sweep_config",
    "render",
    "run_experiment",
    "save_model",
    "sweep",
    "synthetic_series",
    "write_series",
]
