"""Seeded execution of a configured experiment."""

from __future__ import annotations

import os
import time
from dataclasses import replace

from ..errors import ConfigError, ResourceGuardError
from .config import ExperimentConfig, coerce
from .experiments import get_experiment
from .output import (PLOT_SPECS, ResultRow, append_results, append_timing, emit_plot_data, param_hash,
                     write_resolved_config, write_trajectories)

__all__ = ["resolve", "check_budget", "run_experiment", "execute"]


def resolve(cfg: ExperimentConfig) -> ExperimentConfig:
    exp = get_experiment(cfg.name)
    for key in cfg.parameters:
        if key not in exp.schema:
            raise ConfigError(f"unknown parameter {key!r} for experiment {cfg.name!r}")
    res = cfg.resolved(exp.schema)
    for key, (kind, _) in exp.schema.items():
        val = res.parameters[key]
        if isinstance(val, str) and kind is not str:
            res.parameters[key] = coerce(kind, val, key)
    if res.trajectories and not exp.trajectories:
        raise ConfigError(f"experiment {cfg.name!r} does not record trajectories")
    return res


def check_budget(cfg: ExperimentConfig) -> int:
    """Work estimate (sites x steps x replicas); raises before anything is allocated."""
    estimate = int(get_experiment(cfg.name).cost(cfg))
    if estimate > cfg.budget:
        raise ResourceGuardError(
            f"{cfg.name}: estimated work {estimate:.3g} exceeds budget {cfg.budget:.3g}", estimate, cfg.budget)
    return estimate


def run_experiment(cfg: ExperimentConfig):
    """Resolve, guard and run; returns (resolved config, result rows, trajectory records)."""
    cfg = resolve(cfg)
    check_budget(cfg)
    phash = param_hash(cfg)
    t0 = time.perf_counter()
    out = get_experiment(cfg.name).run(cfg)
    wall = time.perf_counter() - t0
    rows = [ResultRow(cfg.name, phash, m.metric, m.value, m.stderr, m.replicas, wall) for m in out.metrics]
    return cfg, rows, out.trajectories


def execute(cfg: ExperimentConfig, plots: bool = True) -> dict:
    """Run and persist everything under ``cfg.out``; returns the paths written."""
    cfg, rows, records = run_experiment(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    paths = {"results": os.path.join(cfg.out, "results.csv"),
             "timings": os.path.join(cfg.out, "timings.csv"),
             "config": os.path.join(cfg.out, "config.resolved")}
    append_results(paths["results"], rows)
    append_timing(paths["timings"], cfg.name, rows[0].param_hash if rows else param_hash(cfg),
                  rows[0].wall_time if rows else 0.0)
    # the file sits inside the output directory, so the location is recorded as "."
    write_resolved_config(paths["config"], replace(cfg, out="."))
    if cfg.trajectories:
        paths["trajectories"] = os.path.join(cfg.out, "trajectories.ndjson")
        write_trajectories(paths["trajectories"], records)
    if plots and cfg.name in PLOT_SPECS:
        paths["plots"] = emit_plot_data(rows, PLOT_SPECS[cfg.name], os.path.join(cfg.out, "plots"), cfg.name)
    return paths
