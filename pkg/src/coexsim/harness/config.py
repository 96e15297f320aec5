"""Experiment configuration files.

Format (INI style, read with :mod:`configparser`)::

    # comment
    [experiment]
    name = barw-sweep
    seed = 42
    replicas = 2000
    horizon = 20
    dt = 0.001
    out = results/barw

    [parameters]
    s_values = 0, 1, 2, 5, 10

Keys before the first header belong to ``[experiment]``.  Every error
message starts with ``line N:``.  Parameter keys are checked against the
schema of the named experiment.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field

from ..errors import ConfigError

__all__ = ["ExperimentConfig", "parse_config", "serialize_config", "EXPERIMENT_KEYS", "coerce"]

# key -> (type, default); a default of ... marks a required key
EXPERIMENT_KEYS = {
    "name": (str, ...),
    "seed": (int, 0),
    "replicas": (int, 1000),
    "horizon": (float, 1.0),
    "dt": (float, 1e-3),
    "out": (str, "results"),
    "trajectories": (bool, False),
    "budget": (float, 2e10),
}

_POSITIVE = {"replicas", "dt", "budget"}
_NONNEGATIVE = {"seed", "horizon"}


@dataclass
class ExperimentConfig:
    name: str
    seed: int = 0
    replicas: int = 1000
    horizon: float = 1.0
    dt: float = 1e-3
    out: str = "results"
    trajectories: bool = False
    budget: float = 2e10
    parameters: dict = field(default_factory=dict)

    def resolved(self, schema: dict) -> "ExperimentConfig":
        """Copy with every schema default filled in."""
        params = {k: default for k, (_, default) in schema.items()}
        params.update(self.parameters)
        return ExperimentConfig(self.name, self.seed, self.replicas, self.horizon, self.dt, self.out,
                                self.trajectories, self.budget, params)


def coerce(kind, raw: str, key: str, line=None):
    """Convert a raw string to the schema type (list types are comma-separated)."""
    text = raw.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is str:
            return text
        if isinstance(kind, list):
            (inner,) = kind
            if not text:
                return []
            return [coerce(inner, part, key, line) for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw.strip()!r} as {_type_name(kind)}", line) from None
    raise ConfigError(f"{key}: unsupported type", line)


def _type_name(kind):
    if isinstance(kind, list):
        return f"list of {kind[0].__name__}"
    return kind.__name__


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    return str(value)


_KEY_RE = re.compile(r"^\s*([^=#\[\s][^=]*?)\s*=")
_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")


def _line_index(text: str, section=None) -> dict:
    index = {}
    for no, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            index[(section, None)] = no
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            index.setdefault((section, m.group(1)), no)
    return index


def _leading(text: str):
    """Lines up to and including the first one that is neither blank nor a comment."""
    for line in text.splitlines():
        yield line
        if line.strip() and not line.lstrip().startswith("#"):
            return


def parse_config(text: str, schemas: dict | None = None) -> ExperimentConfig:
    """Parse and validate configuration text.

    ``schemas`` maps experiment names to parameter schemas; by default the
    registered experiments are used.
    """
    if schemas is None:
        from .experiments import REGISTRY

        schemas = {name: exp.schema for name, exp in REGISTRY.items()}
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#",),
                                       inline_comment_prefixes=("#",), strict=True,
                                       empty_lines_in_values=False, default_section="\x00")
    parser.optionxform = str
    # keys ahead of the first header belong to [experiment]; the synthetic
    # header line is subtracted from reported line numbers
    headerless = not any(_SECTION_RE.match(ln) for ln in _leading(text))
    shift = 1 if headerless else 0
    try:
        parser.read_string("[experiment]\n" + text if headerless else text)
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(f"duplicate entry {getattr(exc, 'option', None) or exc.section!r}",
                          exc.lineno - shift) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] - shift if getattr(exc, "errors", None) else None
        raise ConfigError("malformed line (expected key = value)", lineno) from None
    lines = _line_index(text, "experiment" if headerless else None)
    if headerless:
        lines[("experiment", None)] = 1
    for section in parser.sections():
        if section not in ("experiment", "parameters"):
            raise ConfigError(f"unknown section [{section}]", lines.get((section, None)))
    if not parser.has_section("experiment"):
        raise ConfigError("missing [experiment] section", 1)

    exp = parser["experiment"]
    values = {}
    for key, raw in exp.items():
        line = lines.get(("experiment", key))
        if key not in EXPERIMENT_KEYS:
            raise ConfigError(f"unknown key {key!r} in [experiment]", line)
        kind, _ = EXPERIMENT_KEYS[key]
        val = coerce(kind, raw, key, line)
        if key in _POSITIVE and not val > 0:
            raise ConfigError(f"{key} must be positive", line)
        if key in _NONNEGATIVE and val < 0:
            raise ConfigError(f"{key} must be nonnegative", line)
        values[key] = val
    for key, (_, default) in EXPERIMENT_KEYS.items():
        if default is ... and key not in values:
            raise ConfigError(f"missing required key {key!r}", lines.get(("experiment", None)))
    name = values["name"]
    if name not in schemas:
        raise ConfigError(f"unknown experiment {name!r}", lines.get(("experiment", "name")))
    schema = schemas[name]

    params = {}
    if parser.has_section("parameters"):
        for key, raw in parser["parameters"].items():
            line = lines.get(("parameters", key))
            if key not in schema:
                raise ConfigError(f"unknown parameter {key!r} for experiment {name!r}", line)
            params[key] = coerce(schema[key][0], raw, key, line)
    for key, (_, default) in schema.items():
        if default is ... and key not in params:
            raise ConfigError(f"missing required parameter {key!r}", lines.get(("parameters", None), 1))
    return ExperimentConfig(parameters=params, **values)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Text that parses back to an equal configuration."""
    out = ["[experiment]"]
    for key in EXPERIMENT_KEYS:
        out.append(f"{key} = {_format(getattr(cfg, key))}")
    out.append("")
    out.append("[parameters]")
    for key in sorted(cfg.parameters):
        out.append(f"{key} = {_format(cfg.parameters[key])}")
    return "\n".join(out) + "\n"
