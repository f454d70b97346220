"""Run configuration files.

Flat ``key = value`` lines set the network parameters; optional ``[sweep]``
and ``[mc]`` sections describe a parameter sweep and a Monte Carlo block::

    lambda = 0.1
    alpha = 4
    p = 0.5
    output = results.csv

    [sweep]
    variable = p
    start = 0.05
    stop = 0.95
    count = 19
    spacing = linear

    [mc]
    n = 100000
    seed = 7
    radius = default

Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

import numpy as np

from .core import NetworkParams
from .errors import ConfigurationError
from .mcsim import RadiusPolicy

PARAM_KEYS = {"lambda": "lam", "alpha": "alpha", "d_sd": "d_sd", "p": "p", "tau": "tau", "p_s": "p_s"}
TOP_KEYS = set(PARAM_KEYS) | {"tau_db", "output"}
SWEEP_KEYS = {"variable", "start", "stop", "count", "spacing"}
SWEEP_VARIABLES = {"lambda": "lam", "p": "p", "tau": "tau", "d_sd": "d_sd"}
MC_KEYS = {"n", "seed", "radius"}
_TOP = "params"


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigurationError(
                f"sweep variable must be one of {sorted(SWEEP_VARIABLES)}, got {self.variable!r}"
            )
        if self.count < 2:
            raise ConfigurationError(f"sweep count must be >= 2, got {self.count}")
        if self.spacing not in ("linear", "log"):
            raise ConfigurationError(f"sweep spacing must be linear or log, got {self.spacing!r}")
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise ConfigurationError("log spacing needs positive start and stop")

    @property
    def field(self) -> str:
        return SWEEP_VARIABLES[self.variable]

    def values(self) -> list[float]:
        if self.spacing == "log":
            grid = np.logspace(math.log10(self.start), math.log10(self.stop), self.count)
        else:
            grid = np.linspace(self.start, self.stop, self.count)
        return [float(v) for v in grid]


@dataclass(frozen=True)
class McConfig:
    n: int = 100_000
    seed: int = 0
    radius: RadiusPolicy = field(default_factory=RadiusPolicy)


@dataclass(frozen=True)
class RunConfig:
    params: NetworkParams = field(default_factory=NetworkParams)
    sweep: SweepSpec | None = None
    mc: McConfig | None = None
    output_path: str | None = None


def _number(section: str, key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"[{section}] {key}: not a number: {text!r}") from None


def _integer(section: str, key: str, text: str) -> int:
    value = _number(section, key, text)
    if value != int(value):
        raise ConfigurationError(f"[{section}] {key}: expected an integer, got {text!r}")
    return int(value)


def parse_config(text: str = "", overrides=()) -> RunConfig:
    """Parse config text plus ``key=value`` overrides (``section.key=value`` for sections)."""
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        parser.read_string(f"[{_TOP}]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}".splitlines()[0]) from None
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"override must look like key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        section, _, key = key.rpartition(".")
        section = section or _TOP
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)

    allowed = {_TOP: TOP_KEYS, "sweep": SWEEP_KEYS, "mc": MC_KEYS}
    for section in parser.sections():
        if section not in allowed:
            raise ConfigurationError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in allowed[section]:
                raise ConfigurationError(f"unknown key {key!r} in [{section}]")

    top = parser[_TOP]
    values = {PARAM_KEYS[k]: _number(_TOP, k, v) for k, v in top.items() if k in PARAM_KEYS}
    if "tau_db" in top:
        if "tau" in top:
            raise ConfigurationError("give tau or tau_db, not both")
        values["tau"] = 10.0 ** (_number(_TOP, "tau_db", top["tau_db"]) / 10.0)
    params = NetworkParams(**values)

    sweep = None
    if parser.has_section("sweep"):
        s = parser["sweep"]
        missing = {"variable", "start", "stop", "count"} - set(s)
        if missing:
            raise ConfigurationError(f"[sweep] missing {sorted(missing)}")
        sweep = SweepSpec(
            variable=s["variable"],
            start=_number("sweep", "start", s["start"]),
            stop=_number("sweep", "stop", s["stop"]),
            count=_integer("sweep", "count", s["count"]),
            spacing=s.get("spacing", "linear"),
        )
        # both ends must be valid parameter values
        for end in (sweep.start, sweep.stop):
            params.with_(**{sweep.field: end})

    mc = None
    if parser.has_section("mc"):
        m = parser["mc"]
        radius_text = m.get("radius", "default")
        radius = RadiusPolicy() if radius_text == "default" else RadiusPolicy(
            fixed=_number("mc", "radius", radius_text))
        mc = McConfig(
            n=_integer("mc", "n", m.get("n", "100000")),
            seed=_integer("mc", "seed", m.get("seed", "0")),
            radius=radius,
        )
        if mc.seed < 0:
            raise ConfigurationError("[mc] seed must be non-negative")
    return RunConfig(params, sweep, mc, top.get("output"))


def load_config(path=None, overrides=()) -> RunConfig:
    text = ""
    if path is not None:
        with open(path) as fh:
            text = fh.read()
    return parse_config(text, overrides)
