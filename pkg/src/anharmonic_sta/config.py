"""Run configuration: flat ``key = value`` files plus command-line overrides.

Precedence is flags > file > defaults.  Values of ``u`` may be written with a
``pi`` suffix (``3pi``, ``3.00001*pi``).
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import traps

PROTOCOLS = ("cosine", "sine", "sine2", "experimental")
TRAPS = ("harmonic", "cubic", "quartic")
INVERSIONS = ("perturbative", "exact")
SWEEP_TARGETS = ("fig2", "fig3", "fig4")


class ConfigError(ValueError):
    pass


def parse_u(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    t = str(text).strip().lower().replace(" ", "")
    m = re.fullmatch(r"([0-9.eE+-]*)\*?(pi|π)", t)
    try:
        if m:
            return (float(m.group(1)) if m.group(1) else 1.0) * math.pi
        return float(t)
    except ValueError:
        raise ConfigError(f"cannot parse u={text!r}") from None


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(",", " ").split()]


@dataclass
class RunConfig:
    protocol: str = "cosine"
    trap: str = "cubic"
    u: float = 3 * math.pi
    xi_over_d: float = 100.0
    # physical block
    omega0: float = traps.DEFAULT_OMEGA0
    mass: float = traps.DEFAULT_MASS
    d_over_a0: float = traps.DEFAULT_D_OVER_A0
    # numeric block
    ode_steps: int = 20_000
    schedule_samples: int = traps.DEFAULT_SCHEDULE_SAMPLES
    grid_points: int = 4096
    time_steps: int = 20_000
    padding: float = 15.0
    sweep_log10_min: float = 1.0
    sweep_log10_max: float = 5.0
    sweep_points: int = 41
    inversion: str = "perturbative"
    output: str = ""
    sweep_target: str = "fig2"
    protocols: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    workers: int = 1
    plot: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        self.u = parse_u(self.u)
        for name, allowed in (("protocol", PROTOCOLS), ("trap", TRAPS),
                              ("inversion", INVERSIONS), ("sweep_target", SWEEP_TARGETS)):
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")
        for p in self.protocols:
            if p not in PROTOCOLS:
                raise ConfigError(f"unknown protocol {p!r} in protocols list")
        positive = ("u", "xi_over_d", "omega0", "mass", "d_over_a0", "ode_steps",
                    "schedule_samples", "grid_points", "time_steps", "padding",
                    "sweep_points", "workers")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.sweep_log10_max < self.sweep_log10_min:
            raise ConfigError("sweep_log10_max must not be below sweep_log10_min")
        if any(not 0.0 <= s <= 1.0 for s in self.snapshots):
            raise ConfigError("snapshot times must lie in [0, 1]")
        return self

    @property
    def physical(self) -> dict:
        return {"d_over_a0": self.d_over_a0, "omega0": self.omega0, "mass": self.mass}

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, list):
                value = " ".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)


def _coerce(name, raw):
    kinds = {f.name: f for f in fields(RunConfig)}
    if name not in kinds:
        raise ConfigError(f"unknown configuration key {name!r}")
    default = RunConfig.__dataclass_fields__[name]
    if name == "u":
        return parse_u(raw)
    if name == "protocols":
        return str(raw).replace(",", " ").split()
    if name == "snapshots":
        return _floats(raw)
    sample = default.default
    try:
        if isinstance(sample, bool):
            if str(raw).strip().lower() in ("1", "true", "yes", "on"):
                return True
            if str(raw).strip().lower() in ("0", "false", "no", "off", ""):
                return False
            raise ValueError(raw)
        if isinstance(sample, int):
            return int(float(raw)) if float(raw).is_integer() else int(raw)
        if isinstance(sample, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return str(raw).strip()


def parse_text(text: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return {k.replace("-", "_"): _coerce(k.replace("-", "_"), v)
            for k, v in parser["run"].items()}


def load(path=None, overrides: dict | None = None) -> RunConfig:
    values = {}
    if path:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        values.update(parse_text(p.read_text()))
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = _coerce(k, v) if isinstance(v, str) else v
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
