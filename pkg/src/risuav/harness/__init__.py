"""Experiment harness: configs, baselines, metrics, sweeps, figures, CLI."""

from .baselines import random_policy, random_search_best
from .config import ConfigError, ExperimentConfig, load_config
from .metrics import (CSV_HEADER, MetricsRow, attach_running_average, avg_reward,
                      final_window_mean, read_metrics_csv, write_metrics_csv)
from .runner import run_experiment, run_sweep

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "CSV_HEADER",
    "MetricsRow",
    "avg_reward",
    "attach_running_average",
    "write_metrics_csv",
    "read_metrics_csv",
    "final_window_mean",
    "random_policy",
    "random_search_best",
    "run_experiment",
    "run_sweep",
]
