"""Command line entry point.

    coexsim list
    coexsim run --config exp.cfg [--seed 1] [--replicas 500] [--out DIR]
    coexsim barw-sweep [--config exp.cfg] [--param s_values=0,1,2] ...

Exit codes: 0 success, 2 validation error, 3 resource-guard refusal.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from ..errors import ParameterError, ResourceGuardError
from .config import EXPERIMENT_KEYS, ExperimentConfig, coerce, parse_config
from .experiments import REGISTRY
from .runner import execute

EXIT_OK, EXIT_INVALID, EXIT_GUARD = 0, 2, 3


def _add_common(p: argparse.ArgumentParser, need_config: bool):
    p.add_argument("--config", metavar="PATH", required=need_config, help="experiment configuration file")
    p.add_argument("--seed", type=int, help="overrides the configured seed")
    p.add_argument("--replicas", type=int, help="overrides the configured replica count")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker threads for compiled kernels")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="set an experiment or model parameter (repeatable)")
    p.add_argument("--no-plots", action="store_true", help="skip plot-data files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coexsim", description="Seeded simulation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list registered experiments")
    _add_common(sub.add_parser("run", help="run the experiment named in a config file"), True)
    for name, exp in REGISTRY.items():
        _add_common(sub.add_parser(name, help=exp.description), False)
    return parser


def _load(args) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        if args.command != "run" and cfg.name != args.command:
            raise ParameterError(f"config names experiment {cfg.name!r}, not {args.command!r}")
    else:
        cfg = ExperimentConfig(name=args.command)
    schema = REGISTRY[cfg.name].schema
    params = dict(cfg.parameters)
    top = {}
    for item in args.param:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep:
            raise ParameterError(f"--param expects KEY=VALUE, got {item!r}")
        if key in EXPERIMENT_KEYS and key != "name":
            top[key] = coerce(EXPERIMENT_KEYS[key][0], raw, key)
        elif key in schema:
            params[key] = coerce(schema[key][0], raw, key)
        else:
            raise ParameterError(f"unknown parameter {key!r} for experiment {cfg.name!r}")
    for key in ("seed", "replicas", "out"):
        val = getattr(args, key)
        if val is not None:
            top[key] = val
    cfg = replace(cfg, parameters=params, **top)
    if cfg.replicas < 1 or cfg.seed < 0 or not cfg.dt > 0:
        raise ParameterError("need replicas >= 1, seed >= 0 and dt > 0")
    return cfg


def _set_threads(n: int):
    if n < 1:
        raise ParameterError("--threads must be at least 1")
    if n == 1:
        return
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for name, exp in REGISTRY.items():
            print(f"{name:22s} {exp.description}")
        return EXIT_OK
    try:
        _set_threads(args.threads)
        cfg = _load(args)
        paths = execute(cfg, plots=not args.no_plots)
    except ResourceGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(paths["results"])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
