"""Run configuration: flat ``key = value`` files, flag overrides and validation."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field

from .cases import CASES
from .meshgen import GENERATORS
from .timeint import UnsupportedCombination


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass
class RunConfig:
    """Everything needed to reproduce a run.

    ``mesh`` is either a generator name (``cartesian``, ``quad``,
    ``triquad``, ``polygonal``) or a path to a mesh file.  ``boundary``
    defaults to the case's natural boundary.  ``output_every`` is the field
    dump cadence in steps (0 dumps only the initial and final states).
    """

    case: str = "oblique"
    mesh: str = "cartesian"
    n: int = 32
    seed: int = 0
    amplitude: float | None = None
    boundary: str | None = None
    scheme: str = "nodal_pressure"
    order: int = 1
    stencil: str = "node"
    cfl: float = 0.3
    t_end: float = 0.5
    output_every: int = 0
    output_dir: str = "out"
    radial_variable: str = "p"
    levels: tuple = (32, 64, 128)
    samples: int = 128
    threads: int | None = None
    case_params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["levels"] = list(self.levels)
        return d


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_CASE_PREFIX = "case."


def _convert(key: str, raw):
    """Coerce a raw string (from a file or a flag) to the field's type."""
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if key in ("n", "seed", "order", "output_every", "samples"):
            return int(text)
        if key in ("cfl", "t_end"):
            return float(text)
        if key == "amplitude":
            return None if text.lower() in ("", "none", "default") else float(text)
        if key == "threads":
            return None if text == "" else int(text)
        if key == "boundary":
            return None if text.lower() in ("", "none", "default") else text.lower()
        if key == "levels":
            return tuple(int(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(key, f"cannot parse {text!r}") from None
    return text


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", "expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise ConfigError(f"line {lineno}", "empty key")
            out[key] = value
    return out


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Resolve defaults, then the file at ``path``, then ``overrides`` (flags).

    ``None`` values in ``overrides`` mean "not given".  Keys of the form
    ``case.<name>`` are passed to the case constructor.
    """
    merged: dict = {}
    if path is not None:
        merged.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    kwargs: dict = {}
    case_params: dict = {}
    for key, value in merged.items():
        if key.startswith(_CASE_PREFIX):
            try:
                case_params[key[len(_CASE_PREFIX):]] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(key, f"cannot parse {value!r}") from None
        elif key in _FIELDS and key != "case_params":
            kwargs[key] = _convert(key, value)
        else:
            raise ConfigError(key, "unknown key")
    cfg = RunConfig(**kwargs)
    cfg.case_params = case_params
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.case not in CASES:
        raise ConfigError("case", f"unknown case {cfg.case!r}; choose from {sorted(CASES)}")
    if cfg.mesh not in GENERATORS and not os.path.exists(cfg.mesh):
        raise ConfigError("mesh", f"{cfg.mesh!r} is neither a generator ({sorted(GENERATORS)}) nor a file")
    if cfg.n < 1:
        raise ConfigError("n", "must be positive")
    if cfg.scheme not in ("nodal_pressure", "nodal_velocity"):
        raise ConfigError("scheme", "must be nodal_pressure or nodal_velocity")
    if cfg.order not in (1, 2):
        raise ConfigError("order", "must be 1 or 2")
    if cfg.scheme == "nodal_velocity" and cfg.order != 1:
        raise UnsupportedCombination("the nodal-velocity scheme exists only at first order")
    if cfg.stencil not in ("node", "edge"):
        raise ConfigError("stencil", "must be node or edge")
    if not 0 < cfg.cfl <= 1:
        raise ConfigError("cfl", "must lie in (0, 1]")
    if cfg.t_end < 0:
        raise ConfigError("t_end", "must be non-negative")
    if cfg.output_every < 0:
        raise ConfigError("output_every", "must be non-negative")
    if cfg.boundary not in (None, "periodic", "zerogradient"):
        raise ConfigError("boundary", "must be periodic or zerogradient")
    if cfg.radial_variable not in ("u", "v", "p", "speed"):
        raise ConfigError("radial_variable", "must be u, v, p or speed")
    if len(cfg.levels) < 2 or any(n < 1 for n in cfg.levels):
        raise ConfigError("levels", "need at least two positive resolutions")
    if cfg.samples < 2:
        raise ConfigError("samples", "must be at least 2")
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("threads", "must be positive")
    return cfg


def resolve_threads(flag: int | None) -> int:
    """``--threads`` if given, else ``VORTEXFV_THREADS``, else 1."""
    if flag is not None:
        return flag
    env = os.environ.get("VORTEXFV_THREADS", "").strip()
    if not env:
        return 1
    try:
        value = int(env)
    except ValueError:
        raise ConfigError("VORTEXFV_THREADS", f"cannot parse {env!r}") from None
    if value < 1:
        raise ConfigError("VORTEXFV_THREADS", "must be positive")
    return value
