"""Result persistence and plot-data emission.

``results.csv`` starts with a schema comment line followed by a fixed
header; rows are appended.  Floats are written with ``repr`` so a rerun
with the same configuration reproduces the file byte for byte.  Wall times
go to ``timings.csv`` because they are the one thing that differs between
reruns.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, replace

from ..errors import ParameterError
from .config import ExperimentConfig, serialize_config
from .experiments import parse_metric

__all__ = [
    "SCHEMA_LINE",
    "RESULT_COLUMNS",
    "ResultRow",
    "param_hash",
    "append_results",
    "read_results",
    "append_timing",
    "write_resolved_config",
    "write_trajectories",
    "PlotSpec",
    "PLOT_SPECS",
    "emit_plot_data",
]

SCHEMA_LINE = "# coexsim-results v1"
RESULT_COLUMNS = ("experiment", "param_hash", "metric", "value", "stderr", "replicas")


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    param_hash: str
    metric: str
    value: float
    stderr: float
    replicas: int
    wall_time: float = 0.0


def param_hash(cfg: ExperimentConfig) -> str:
    """Hash of the resolved configuration, ignoring the output location."""
    text = serialize_config(replace(cfg, out=""))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _num(x) -> str:
    return repr(float(x))


def append_results(path, rows) -> None:
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        if new:
            fh.write(SCHEMA_LINE + "\n")
            fh.write(",".join(RESULT_COLUMNS) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        for r in rows:
            w.writerow([r.experiment, r.param_hash, r.metric, _num(r.value), _num(r.stderr), int(r.replicas)])


def read_results(path) -> list:
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != SCHEMA_LINE:
            raise ParameterError(f"{path}: not a v1 results file")
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RESULT_COLUMNS:
            raise ParameterError(f"{path}: unexpected columns {reader.fieldnames}")
        return [ResultRow(r["experiment"], r["param_hash"], r["metric"], float(r["value"]), float(r["stderr"]),
                          int(r["replicas"])) for r in reader]


def append_timing(path, experiment: str, phash: str, wall_time: float) -> None:
    new = not os.path.exists(path)
    with open(path, "a", newline="") as fh:
        if new:
            fh.write("experiment,param_hash,wall_time\n")
        fh.write(f"{experiment},{phash},{wall_time!r}\n")


def write_resolved_config(path, cfg: ExperimentConfig) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_config(cfg))


def write_trajectories(path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


@dataclass(frozen=True)
class PlotSpec:
    """Which metric to project and which coordinate becomes the x column.

    kind ``'curve'`` writes one file per remaining coordinate combination;
    kind ``'grid'`` writes ``(x, y, value)`` triples with ``y`` the second
    coordinate, plus a boundary file when ``boundary`` names metrics.
    """

    metric: str
    x: str
    kind: str = "curve"
    y: str | None = None
    boundary: tuple = ()


PLOT_SPECS = {
    "barw-sweep": PlotSpec("survival", "s"),
    "percolation-curve": PlotSpec("survival", "theta"),
    "model2-coexistence": PlotSpec("interior", "s"),
    "flip-probabilities": PlotSpec("nonrec", "M"),
    "environment-control": PlotSpec("late", "v"),
    "spin-pipeline": PlotSpec("reach_origin", "n"),
    "duality-matrix": PlotSpec("gap", "instance"),
    "np-sweep": PlotSpec("coexistence", "alpha12", "grid", "alpha21", ("boundary_lower", "boundary_upper")),
}


def _select(rows, base):
    out = []
    for r in rows:
        b, coords = parse_metric(r.metric)
        if b == base:
            out.append((coords, r))
    return out


def emit_plot_data(rows, spec: PlotSpec, out_dir, stem: str = "plot") -> list:
    """Write columnar text files for plotting; returns the paths written."""
    sel = _select(rows, spec.metric)
    if not sel:
        raise ParameterError(f"no rows for metric {spec.metric!r}")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if spec.kind == "grid":
        path = os.path.join(out_dir, f"{stem}_{spec.metric}_grid.dat")
        with open(path, "w") as fh:
            fh.write(f"# {spec.x} {spec.y} {spec.metric} stderr\n")
            for coords, r in sorted(sel, key=lambda cr: (float(cr[0][spec.y]), float(cr[0][spec.x]))):
                fh.write(f"{coords[spec.x]} {coords[spec.y]} {r.value!r} {r.stderr!r}\n")
        paths.append(path)
        if spec.boundary:
            lines = {}
            for name in spec.boundary:
                for coords, r in _select(rows, name):
                    lines.setdefault(coords[spec.y], {})[name] = r.value
            if lines:
                path = os.path.join(out_dir, f"{stem}_boundaries.dat")
                with open(path, "w") as fh:
                    fh.write(f"# {spec.y} " + " ".join(spec.boundary) + "\n")
                    for yv in sorted(lines, key=float):
                        fh.write(yv + " " + " ".join(repr(lines[yv].get(n, float("nan"))) for n in spec.boundary)
                                 + "\n")
                paths.append(path)
        return paths
    groups = {}
    for coords, r in sel:
        if spec.x not in coords:
            raise ParameterError(f"metric {r.metric!r} has no coordinate {spec.x!r}")
        rest = tuple(sorted((k, v) for k, v in coords.items() if k != spec.x))
        groups.setdefault(rest, []).append((float(coords[spec.x]), r))
    for rest, pts in sorted(groups.items()):
        suffix = "".join(f"_{k}-{v}" for k, v in rest)
        path = os.path.join(out_dir, f"{stem}_{spec.metric}{suffix}.dat")
        with open(path, "w") as fh:
            fh.write(f"# {spec.x} {spec.metric} stderr\n")
            for xv, r in sorted(pts, key=lambda p: p[0]):
                fh.write(f"{xv!r} {r.value!r} {r.stderr!r}\n")
        paths.append(path)
    return paths
