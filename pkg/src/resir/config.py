"""Run configuration: INI-style files plus command-line overrides.

Grammar (parsed with :mod:`configparser`, keys are case sensitive)::

    [run]                     # applies to every experiment
    experiment = bench-univariate
    seed = 7
    schemes = sir, anti-sir, lhs-sir

    [bench-univariate]        # only read when this experiment runs
    N = 20000
    n = 1000
    K = 1000
    target = beta(2,3)
    proposal = unif(0,1)

Precedence, lowest first: built-in defaults, ``[run]``, the experiment's
section, command-line flags.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .densities import ParameterError, parse_distribution
from .rng import SEED_MAX
from .sir import Scheme

EXPERIMENTS = ("bench-univariate", "bench-kotz", "changepoint", "convergence-check")
FORMATS = ("csv", "json")
CENTERS = ("grand-mean", "true-mean")

DEFAULT_SIZES = {
    "bench-univariate": (20000, 1000, 1000),
    "bench-kotz": (2000, 400, 1000),
    "changepoint": (5000, 2000, 1000),
    "convergence-check": (20000, 1000, 1),
}


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = ""
        if key is not None:
            where = f"{key}: "
        if line is not None:
            where = f"line {line}: " + where
        super().__init__(where + message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    schemes: tuple[Scheme, ...] = tuple(Scheme)
    N: int | None = None
    n: int | None = None
    K: int | None = None
    seed: int = 0
    target: str | None = None
    proposal: str | None = None
    case: str = "both"
    data: str | None = None
    center: str = "grand-mean"
    pool_sizes: tuple[int, ...] = ()
    output: str | None = None
    format: str = "csv"
    plot_data: str | None = None

    def sizes(self) -> tuple[int, int, int]:
        dN, dn, dK = DEFAULT_SIZES[self.experiment]
        return (self.N or dN, self.n or dn, self.K or dK)

    def cells(self) -> list[tuple[str, str]]:
        from .bench import KOTZ_CELL, UNIVARIATE_CELLS

        if self.target or self.proposal:
            if not (self.target and self.proposal):
                raise ConfigError("target and proposal must be given together", "target")
            return [(self.target, self.proposal)]
        if self.experiment == "bench-kotz":
            return [KOTZ_CELL]
        if self.experiment == "convergence-check":
            return [UNIVARIATE_CELLS[0]]
        return list(UNIVARIATE_CELLS)

    def cases(self) -> list[int]:
        return [1, 2] if self.case == "both" else [int(self.case)]

    def to_ini(self) -> str:
        """Serialize so that :func:`parse_config` reproduces this config."""
        lines = ["[run]"]
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None or value == ():
                continue
            if f.name == "schemes":
                value = ", ".join(s.value for s in value)
            elif f.name == "pool_sizes":
                value = ", ".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


_KEYS = {f.name for f in fields(RunConfig)}
_SIZE_KEYS = ("N", "n", "K")


def _coerce(key: str, raw, line: int | None = None):
    """Convert a raw string (or already-typed flag value) for ``key``."""
    if raw is None:
        return None
    text = raw if isinstance(raw, str) else None
    try:
        if key in _SIZE_KEYS:
            value = int(raw)
            if value < 1:
                raise ConfigError(f"must be a positive integer, got {value}", key, line)
            return value
        if key == "seed":
            value = int(raw)
            if not 0 <= value <= SEED_MAX:
                raise ConfigError("must be a 64-bit unsigned integer", key, line)
            return value
        if key == "schemes":
            items = [s for s in re.split(r"[,\s]+", text) if s] if text is not None else list(raw)
            if not items:
                raise ConfigError("scheme list is empty", key, line)
            return tuple(Scheme.parse(s) for s in items)
        if key == "pool_sizes":
            items = [s for s in re.split(r"[,\s]+", text) if s] if text is not None else list(raw)
            sizes = tuple(int(s) for s in items)
            if any(s < 1 for s in sizes):
                raise ConfigError("pool sizes must be positive", key, line)
            return sizes
        if key in ("target", "proposal"):
            dist = parse_distribution(str(raw))
            if key == "proposal" and not dist.can_draw:
                raise ConfigError(f"{raw!r} cannot be sampled directly", key, line)
            return str(raw).strip()
        if key == "experiment":
            value = str(raw).strip()
            if value not in EXPERIMENTS:
                raise ConfigError(f"unknown experiment {value!r}; expected one of {', '.join(EXPERIMENTS)}", key, line)
            return value
        if key == "format":
            value = str(raw).strip().lower()
            if value not in FORMATS:
                raise ConfigError(f"format must be csv or json, got {value!r}", key, line)
            return value
        if key == "center":
            value = str(raw).strip().lower()
            if value not in CENTERS:
                raise ConfigError(f"center must be grand-mean or true-mean, got {value!r}", key, line)
            return value
        if key == "case":
            value = str(raw).strip().lower()
            if value not in ("1", "2", "both"):
                raise ConfigError(f"case must be 1, 2 or both, got {value!r}", key, line)
            return value
        return str(raw).strip()
    except ConfigError:
        raise
    except (ValueError, ParameterError) as exc:
        raise ConfigError(str(exc), key, line) from None


def _line_index(text: str) -> dict[tuple[str, str], int]:
    index, section = {}, None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"^\[([^\]]+)\]$", stripped)
        if m:
            section = m.group(1).strip()
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip()), lineno)
    return index


def read_config_file(path: str | Path) -> tuple[dict, dict]:
    """Parse a config file into ``(run_values, {experiment: values})``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}".replace("\n", " ")) from None
    lines = _line_index(text)
    sections: dict[str, dict] = {}
    for section in parser.sections():
        if section != "run" and section not in EXPERIMENTS:
            raise ConfigError(f"unknown section [{section}]", section)
        values = {}
        for key, raw in parser.items(section):
            line = lines.get((section, key))
            if key not in _KEYS:
                raise ConfigError("unknown key", key, line)
            if section != "run" and key == "experiment":
                raise ConfigError("experiment may only be set in [run]", key, line)
            values[key] = _coerce(key, raw, line)
        sections[section] = values
    return sections.pop("run", {}), sections


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, a config file and flag overrides into a RunConfig."""
    merged: dict = {}
    per_experiment: dict = {}
    if path is not None:
        run_values, per_experiment = read_config_file(path)
        merged.update(run_values)
    flags = {k: v for k, v in (overrides or {}).items() if v is not None}
    for key in flags:
        if key not in _KEYS:
            raise ConfigError("unknown key", key)
    experiment = flags.get("experiment", merged.get("experiment"))
    if experiment is None:
        raise ConfigError("no experiment given", "experiment")
    experiment = _coerce("experiment", experiment)
    merged.update(per_experiment.get(experiment, {}))
    merged.update({k: _coerce(k, v) for k, v in flags.items()})
    merged["experiment"] = experiment
    cfg = RunConfig(**merged)
    N, n, _ = cfg.sizes()
    if n > N:
        raise ConfigError(f"resample size n={n} exceeds pool size N={N}", "n")
    return cfg


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    return replace(cfg, **{k: _coerce(k, v) for k, v in changes.items()})
