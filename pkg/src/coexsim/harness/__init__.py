"""Configuration, experiment registry, seeded execution and result files."""

from .config import ExperimentConfig, parse_config, serialize_config
from .experiments import REGISTRY, Experiment, Metric
from .output import PLOT_SPECS, PlotSpec, ResultRow, emit_plot_data, read_results
from .runner import execute, run_experiment

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "serialize_config",
    "REGISTRY",
    "Experiment",
    "Metric",
    "ResultRow",
    "PlotSpec",
    "PLOT_SPECS",
    "emit_plot_data",
    "read_results",
    "run_experiment",
    "execute",
]
