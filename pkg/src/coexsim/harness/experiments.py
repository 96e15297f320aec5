"""Registry of runnable experiments.

Each experiment declares a parameter schema ``key -> (type, default)``, a
cost estimate (sites x steps x replicas, used by the resource guard) and a
``run`` function returning metric rows.  Metric names carry the swept
coordinate after an ``@``, e.g. ``survival@s=2`` or
``coexistence@alpha12=0.5;alpha21=1.0``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..diffusion import FellerSpec, LotkaVolterraParams, TimeGrid, integrate_lotka_volterra
from ..duality import DualityInstance, duality_gap, standard_instances
from ..errors import ConfigError
from ..lattice import RadialKernel, Torus
from ..model_one import InitialBox, ModelOneParams, estimate_survival, validate_params
from ..model_two import ModelTwoParams, estimate_interior_occupation
from ..particles import BarwParams, barw_simulate, np_coexistence_sweep
from ..percolation import survival_curve
from ..spin import (SpinParams, domination_refinement, estimate_environment_control,
                    estimate_flip_probabilities, spin_pipeline, standard_pairings)

__all__ = ["Metric", "RunOutput", "Experiment", "REGISTRY", "metric_name", "parse_metric"]

FLOATS = [float]
INTS = [int]


@dataclass(frozen=True)
class Metric:
    metric: str
    value: float
    stderr: float
    replicas: int


@dataclass
class RunOutput:
    metrics: list
    trajectories: list = field(default_factory=list)


@dataclass(frozen=True)
class Experiment:
    name: str
    schema: dict
    run: Callable
    cost: Callable
    description: str = ""
    trajectories: bool = False


def _fmt(v):
    if isinstance(v, float) and v.is_integer():
        return str(int(v)) if abs(v) < 1e15 else repr(v)
    return repr(v) if isinstance(v, float) else str(v)


def metric_name(base: str, **coords) -> str:
    if not coords:
        return base
    return base + "@" + ";".join(f"{k}={_fmt(v)}" for k, v in coords.items())


def parse_metric(name: str):
    """``'survival@s=2'`` -> ``('survival', {'s': '2'})``."""
    base, _, rest = name.partition("@")
    coords = {}
    if rest:
        for part in rest.split(";"):
            k, _, v = part.partition("=")
            coords[k] = v
    return base, coords


def _steps(cfg) -> int:
    return max(1, int(round(cfg.horizon / cfg.dt)))


# shared Model I parameters; the defaults pass every validation check
MODEL_ONE_SCHEMA = {
    "d": (int, 1),
    "side": (int, 16),
    "alpha": (float, 1.0),
    "M": (float, 20.0),
    "m": (FLOATS, [0.0, 0.5]),
    "lam": (FLOATS, [1.0, 0.5]),
    "gamma": (FLOATS, [0.01]),
    "alpha_p": (float, 1.0),
    "M_p": (float, 10.0),
    "m_p": (FLOATS, [0.0, 0.5]),
    "lam_p": (FLOATS, [1.0, 0.5]),
    "gamma_p": (FLOATS, [0.01]),
    "c": (float, 2.0),
    "b": (int, 2),
}


def _model_one(p: dict, **override) -> ModelOneParams:
    q = dict(p)
    q.update(override)
    return ModelOneParams(q["d"], q["side"], q["alpha"], q["M"], RadialKernel(q["m"]), RadialKernel(q["lam"]),
                          RadialKernel(q["gamma"]), q["alpha_p"], q["M_p"], RadialKernel(q["m_p"]),
                          RadialKernel(q["lam_p"]), RadialKernel(q["gamma_p"]), q["c"], q["b"])


def _sites(p) -> int:
    return int(p["side"]) ** int(p["d"])


# ---------------------------------------------------------------- experiments

def _lv_run(cfg):
    p = cfg.parameters
    params = LotkaVolterraParams(p["r1"], p["r2"], p["K1"], p["K2"], p["alpha12"], p["alpha21"])
    traj = integrate_lotka_volterra(params, (p["n1"], p["n2"]), TimeGrid(0.0, cfg.dt, _steps(cfg)))
    final = traj.states[-1]
    rows = [Metric("final_n1", float(final[0]), 0.0, 1), Metric("final_n2", float(final[1]), 0.0, 1),
            Metric("coexistence", float(traj.coexistence), 0.0, 1)]
    if traj.equilibrium is not None:
        rows += [Metric("equilibrium_n1", float(traj.equilibrium[0]), 0.0, 1),
                 Metric("equilibrium_n2", float(traj.equilibrium[1]), 0.0, 1)]
    records = []
    if cfg.trajectories:
        stride = max(1, int(p["record_every"]))
        for k in range(0, len(traj.times), stride):
            records.append({"replica": 0, "t": float(traj.times[k]), "n1": float(traj.states[k, 0]),
                            "n2": float(traj.states[k, 1])})
    return RunOutput(rows, records)


def _model1_run(cfg):
    p = cfg.parameters
    params = _model_one(p)
    report = validate_params(params)
    box = InitialBox(p["kappa1"], p["kappa2"], p["kappa1_p"], p["kappa2_p"], p["halfwidth"])
    est = estimate_survival(params, box, p["kappa"], cfg.horizon, cfg.dt, cfg.replicas, cfg.seed)
    n = cfg.replicas
    return RunOutput([
        Metric("valid", float(report.ok), 0.0, 1),
        Metric("survival", est.survival, est.survival_se, n),
        Metric("persistence", est.persistence, est.persistence_se, n),
        Metric("coexistence", est.coexistence, est.coexistence_se, n),
    ])


def _model2_run(cfg):
    p = cfg.parameters
    rows = []
    for s in p["s_values"]:
        params = ModelTwoParams(p["d"], p["side"], RadialKernel(p["m"]), float(s), p["mu"], p["N"])
        occ = estimate_interior_occupation(params, p["p0"], p["epsilon"], cfg.horizon, cfg.replicas,
                                           cfg.seed, cfg.dt)
        rows.append(Metric(metric_name("interior", s=float(s)), occ.somewhere, occ.somewhere_se, cfg.replicas))
        rows.append(Metric(metric_name("interior_origin", s=float(s)), occ.origin, occ.origin_se, cfg.replicas))
    return RunOutput(rows)


def _barw_params(p, s):
    torus = Torus(p["d"], p["side"])
    return BarwParams.on_torus(float(s), torus, RadialKernel([0.0, p["rate"]]), p["annihilation_scale"])


def _barw_counts(p):
    counts = np.zeros((p["side"],) * p["d"], dtype=np.int64)
    counts[(0,) * p["d"]] = p["n0"]
    return counts


def _survival(run, replicas):
    alive = run.totals > 0
    f = float(alive.mean())
    return f, math.sqrt(f * (1 - f) / replicas)


def _barw_survival_run(cfg):
    p = cfg.parameters
    run = barw_simulate(_barw_params(p, p["s"]), _barw_counts(p), cfg.horizon, cfg.replicas, cfg.seed)
    f, se = _survival(run, cfg.replicas)
    rows = [Metric("survival", f, se, cfg.replicas),
            Metric("mean_particles", float(run.totals.mean()),
                   float(run.totals.std(ddof=1) / math.sqrt(cfg.replicas)) if cfg.replicas > 1 else 0.0,
                   cfg.replicas)]
    records = []
    if cfg.trajectories:
        records = [{"replica": r, "t": cfg.horizon, "particles": int(run.totals[r]), "events": int(run.events[r])}
                   for r in range(cfg.replicas)]
    return RunOutput(rows, records)


def _barw_sweep_run(cfg):
    p = cfg.parameters
    rows = []
    for s in p["s_values"]:
        run = barw_simulate(_barw_params(p, s), _barw_counts(p), cfg.horizon, cfg.replicas, cfg.seed)
        f, se = _survival(run, cfg.replicas)
        rows.append(Metric(metric_name("survival", s=float(s)), f, se, cfg.replicas))
    return RunOutput(rows)


def _np_sweep_run(cfg):
    p = cfg.parameters
    rows, bounds = np_coexistence_sweep(p["alpha12_values"], p["alpha21_values"], cfg.horizon, cfg.replicas,
                                        cfg.seed, p["d"], p["side"], p["radius"], p["density"])
    out = [Metric(metric_name("coexistence", alpha12=r["alpha12"], alpha21=r["alpha21"]), r["coexistence"],
                  r["stderr"], cfg.replicas) for r in rows]
    for a21, lo, hi in zip(bounds["alpha21"], bounds["lower"], bounds["upper"]):
        out.append(Metric(metric_name("boundary_lower", alpha21=float(a21)), float(lo), 0.0, 0))
        out.append(Metric(metric_name("boundary_upper", alpha21=float(a21)), float(hi), 0.0, 0))
    return RunOutput(out)


def _duality_run(cfg):
    p = cfg.parameters
    rows = []
    for i, inst in enumerate(standard_instances(p["N"], p["rate"])):
        if p["use_horizon"]:
            inst = DualityInstance(inst.migration, inst.s, inst.N, inst.x0, inst.n0, cfg.horizon)
        rep = duality_gap(inst, cfg.replicas, cfg.replicas, cfg.seed + i, cfg.dt)
        rows.append(Metric(metric_name("lhs", instance=i), rep.lhs, rep.lhs_se, cfg.replicas))
        rows.append(Metric(metric_name("rhs", instance=i), rep.rhs, rep.rhs_se, cfg.replicas))
        rows.append(Metric(metric_name("gap", instance=i), rep.gap, rep.se, cfg.replicas))
    return RunOutput(rows)


def _percolation_run(cfg):
    p = cfg.parameters
    rows = survival_curve(p["theta_values"], p["n_max"], p["width"], cfg.replicas, cfg.seed, mode=p["mode"])
    out = []
    for r in rows:
        if r["n"] != p["n_max"]:
            continue
        out.append(Metric(metric_name("survival", theta=r["theta"]), r["nonempty"], r["nonempty_se"], cfg.replicas))
        out.append(Metric(metric_name("origin", theta=r["theta"]), r["origin"], r["origin_se"], cfg.replicas))
    return RunOutput(out)


def _flip_run(cfg):
    p = cfg.parameters
    rows = []
    for M in p["M_values"]:
        params = _model_one(p, M=float(M))
        spin = SpinParams.from_model_one(params, p["a"], p["a_p"])
        est = estimate_flip_probabilities(params, spin, cfg.replicas, cfg.seed, dt=cfg.dt, horizon=cfg.horizon)
        rows.append(Metric(metric_name("nonrec", M=float(M)), est.p_nonrec, est.se_nonrec, cfg.replicas))
        rows.append(Metric(metric_name("infec", M=float(M)), est.p_infec, est.se_infec, cfg.replicas))
    return RunOutput(rows)


def _environment_run(cfg):
    p = cfg.parameters
    params = _model_one(p)
    y0 = p["y0_fraction"] * params.M_p
    rows = []
    for v in p["v_values"]:
        est = estimate_environment_control(params, float(v), p["n"], cfg.replicas, cfg.seed, cfg.dt, Y0=y0)
        rows.append(Metric(metric_name("late", v=float(v)), est.p_late, est.se_late, cfg.replicas))
        rows.append(Metric(metric_name("conditional", v=float(v)), est.p_conditional, est.se_conditional,
                           est.conditioned))
    return RunOutput(rows)


def _pipeline_run(cfg):
    p = cfg.parameters
    params = _model_one(p)
    spin = SpinParams.from_model_one(params, p["a"], p["a_p"])
    res = spin_pipeline(params, spin, p["X0"], p["Y0"], p["epochs"], p["width"], cfg.replicas, cfg.seed, cfg.dt)
    rows = []
    for n in range(len(res.open_origin)):
        rows.append(Metric(metric_name("open_origin", n=n), float(res.open_origin[n]),
                           float(res.open_origin_se[n]), cfg.replicas))
        rows.append(Metric(metric_name("reach_origin", n=n), float(res.reach_origin[n]),
                           float(res.reach_origin_se[n]), cfg.replicas))
    return RunOutput(rows)


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")


def _domination_run(cfg):
    rows = []
    for i, (name, s1, s2, z0, region, delta) in enumerate(standard_pairings()):
        coarse, fine = domination_refinement(s1, s2, z0, cfg.horizon, cfg.dt, cfg.seed + i, region=region,
                                             delta=delta, replicas=cfg.replicas)
        tag = _slug(name)
        for label, rep in (("dt", coarse), ("half_dt", fine)):
            rows.append(Metric(metric_name("worst_violation", pairing=tag, step=label), rep.worst_violation,
                               0.0, cfg.replicas))
            rows.append(Metric(metric_name("violations", pairing=tag, step=label),
                               float(rep.violations_above_tol), 0.0, cfg.replicas))
    return RunOutput(rows)


# ------------------------------------------------------------------- registry

def _build():
    exps = [
        Experiment(
            "lotka-volterra",
            {"r1": (float, 1.0), "r2": (float, 1.0), "K1": (float, 1.0), "K2": (float, 1.0),
             "alpha12": (float, 0.5), "alpha21": (float, 0.5), "n1": (float, 0.1), "n2": (float, 0.1),
             "record_every": (int, 100)},
            _lv_run, lambda c: 2 * _steps(c), "deterministic competition ODE", trajectories=True),
        Experiment(
            "model1-survival",
            dict(MODEL_ONE_SCHEMA, kappa1=(float, 1.0), kappa2=(float, 10.0), kappa1_p=(float, 1.0),
                 kappa2_p=(float, 5.0), halfwidth=(float, 2.0), kappa=(float, 0.5)),
            _model1_run, lambda c: 2 * _sites(c.parameters) * _steps(c) * c.replicas,
            "survival, persistence and coexistence of the two-type lattice diffusion"),
        Experiment(
            "model2-coexistence",
            {"d": (int, 1), "side": (int, 8), "m": (FLOATS, [0.0, 1.0]), "s_values": (FLOATS, [0.0, 1.0, 2.0]),
             "mu": (float, 2.0), "N": (float, 20.0), "p0": (float, 0.5), "epsilon": (float, 0.05)},
            _model2_run,
            lambda c: _sites(c.parameters) * _steps(c) * c.replicas * len(c.parameters["s_values"]),
            "interior occupation of the stepping-stone model with selection"),
        Experiment(
            "barw-survival",
            {"d": (int, 1), "side": (int, 32), "rate": (float, 1.0), "s": (float, 0.0), "n0": (int, 2),
             "annihilation_scale": (float, 1.0)},
            _barw_survival_run,
            lambda c: int(c.horizon * (c.parameters["n0"] + c.parameters["s"]) * 4 + 1) * c.replicas,
            "survival of a branching annihilating random walk", trajectories=True),
        Experiment(
            "barw-sweep",
            {"d": (int, 1), "side": (int, 32), "rate": (float, 1.0), "s_values": (FLOATS, [0.0, 1.0, 2.0, 5.0, 10.0]),
             "n0": (int, 2), "annihilation_scale": (float, 1.0)},
            _barw_sweep_run,
            lambda c: sum(int(c.horizon * (c.parameters["n0"] + s) * 4 + 1) for s in c.parameters["s_values"])
            * c.replicas,
            "BARW survival against branching rate"),
        Experiment(
            "np-sweep",
            {"d": (int, 2), "side": (int, 16), "radius": (int, 1), "density": (float, 0.5),
             "alpha12_values": (FLOATS, [0.0, 0.5, 1.0]), "alpha21_values": (FLOATS, [0.0, 0.5, 1.0])},
            _np_sweep_run,
            lambda c: int(_sites(c.parameters) * max(c.horizon, 1.0) * 2) * c.replicas
            * len(c.parameters["alpha12_values"]) * len(c.parameters["alpha21_values"]),
            "coexistence region of the competing contact process"),
        Experiment(
            "duality-matrix",
            {"N": (float, 2.0), "rate": (float, 0.5), "use_horizon": (bool, False)},
            _duality_run, lambda c: 9 * 4 * max(1, int(round(1.0 / c.dt))) * c.replicas * 2,
            "two-sided moment duality check on nine small instances"),
        Experiment(
            "percolation-curve",
            {"theta_values": (FLOATS, [0.0, 0.1, 0.3, 0.5]), "n_max": (int, 20), "width": (int, 24),
             "mode": (str, "full")},
            _percolation_run,
            lambda c: (2 * c.parameters["width"] + 1) * (c.parameters["n_max"] + 1) * c.replicas
            * len(c.parameters["theta_values"]),
            "survival of oriented site percolation against closed probability"),
        Experiment(
            "flip-probabilities",
            dict(MODEL_ONE_SCHEMA, M_values=(FLOATS, [5.0, 10.0, 20.0]), a=(float, 0.5), a_p=(float, 0.5)),
            _flip_run,
            lambda c: 2 * 2 * _sites(c.parameters) * _steps(c) * c.replicas * len(c.parameters["M_values"]),
            "block flip probabilities of the spin construction"),
        Experiment(
            "environment-control",
            dict(MODEL_ONE_SCHEMA, v_values=(FLOATS, [0.25, 0.3, 0.35, 0.45]), n=(int, 0), y0_fraction=(float, 0.25)),
            _environment_run,
            lambda c: 2 * _sites(c.parameters) * (c.parameters["n"] + 2) * max(1, int(round(1 / c.dt)))
            * c.replicas * len(c.parameters["v_values"]),
            "probability that the resident type stays below a multiple of its capacity"),
        Experiment(
            "spin-pipeline",
            dict(MODEL_ONE_SCHEMA, side=(int, 32), a=(float, 0.5), a_p=(float, 1.0), X0=(float, 15.0),
                 Y0=(float, 1.0), epochs=(int, 4), width=(int, 4)),
            _pipeline_run,
            lambda c: 2 * _sites(c.parameters) * c.parameters["epochs"] * max(1, int(round(2 / c.dt)))
            * c.replicas,
            "lattice model to spins to oriented percolation"),
        Experiment(
            "domination-suite",
            {},
            _domination_run, lambda c: 7 * 3 * _steps(c) * c.replicas,
            "pathwise comparison of coupled one-dimensional diffusions"),
    ]
    return {e.name: e for e in exps}


REGISTRY = _build()


def get_experiment(name: str) -> Experiment:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown experiment {name!r}") from None
