"""Experiment configuration files.

A config is an INI file::

    [run]
    experiment = harvest

    [harvest]
    L = 5
    sigma = 0.01

    [sweep]
    param = OmegaT
    start = 0
    stop = 5
    count = 51
    scale = lin

    [tolerances]
    scale = 1

Every section and key is checked against the schema below; anything
unknown is rejected with the list of valid names.
"""

import configparser
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError

__all__ = ["ConfigError", "ExperimentConfig", "SCHEMA", "SweepSpec", "load_config", "parse_config"]

MAX_SWEEP = 1_000_000


class ConfigError(ContractError):
    """Malformed or inconsistent configuration."""


def _choice(*opts):
    def conv(v):
        v = str(v).strip().lower()
        if v not in opts:
            raise ValueError(f"expected one of {', '.join(opts)}")
        return v
    conv.__name__ = "choice"
    return conv


_KINDS = _choice("wightman", "hadamard", "causal", "retarded", "advanced", "symmetric", "feynman")

# experiment -> {key: (converter, default)}
SCHEMA = {
    "propagator": {
        "kind": (_KINDS, "wightman"), "T1": (float, 1.0), "T2": (float, 1.0),
        "sigma1": (float, 0.5), "sigma2": (float, 0.5), "t1": (float, 0.0), "t2": (float, 0.0),
        "Omega1": (float, 0.0), "Omega2": (float, 0.0), "L": (float, 1.0),
    },
    "detector": {
        "lam": (float, 1.0), "Omega": (float, 1.0), "T": (float, 1.0), "sigma": (float, 0.1),
    },
    "harvest": {
        "lam": (float, 1.0), "T": (float, 1.0), "sigma": (float, 0.01), "L": (float, 5.0),
        "OmegaT": (float, 2.0), "threshold": (float, 0.1),
    },
    "modes": {
        "N": (int, 1), "R": (float, 1.0), "delta": (float, 2.0), "T": (float, 1.0),
        "separation": (float, float("nan")),
    },
    "qc": {
        "lam": (float, 1.0), "T": (float, 1.0), "sigma": (float, 0.05), "L": (float, 1.0),
    },
    "gme": {
        "r12": (float, 0.1), "far": (float, 1e5), "m1": (float, 1.0), "m2": (float, 1.0),
        "G": (float, 1.0), "T": (float, math.pi * 0.1), "lam": (float, 1e-3),
    },
    "metric": {
        "chart": (_choice("inertial", "rindler", "half-space", "conformal-rw", "conformal-desitter"),
                  "inertial"),
        "kernel": (_choice("massless", "massive", "half-space", "rw", "desitter", "one-particle"),
                   "massive"),
        "L": (float, 0.1), "m": (float, 1.0), "a": (float, 1.0), "ell": (float, 1.0),
        "nu": (float, 0.3), "mu": (float, 1.0), "sigma_k": (float, 1.0),
        "t": (float, 0.3), "x": (float, 0.1), "y": (float, -0.2), "z": (float, 0.5),
        "sites": (int, 2),
    },
    "tmunu": {
        "ell": (float, 1.0), "mu_fluid": (float, 0.2), "eta": (int, 0), "m_c": (float, 2.0),
        "m_d": (float, 5.0), "r": (float, 1.0),
    },
    "validate": {
        "criteria": (str, "all"),
    },
}

TOLERANCE_KEYS = {
    "scale": (float, 1.0),
    "mode_tail": (float, 1e-11),
    "regulator": (float, 1e-6),
    "metric_fail": (float, 1e-10),
}

_SWEEP_KEYS = ("param", "start", "stop", "count", "scale")


@dataclass(frozen=True)
class SweepSpec:
    param: str
    start: float
    stop: float
    count: int
    scale: str = "lin"

    def __post_init__(self):
        if not 1 <= self.count <= MAX_SWEEP:
            raise ConfigError(f"sweep count must be in [1, {MAX_SWEEP}]")
        if self.scale not in ("lin", "log"):
            raise ConfigError("sweep scale must be 'lin' or 'log'")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("sweep bounds must be finite")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ConfigError("log sweeps need positive bounds")

    def values(self):
        if self.scale == "lin":
            return np.linspace(self.start, self.stop, self.count)
        return np.geomspace(self.start, self.stop, self.count)


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict
    sweep: SweepSpec = None
    tolerances: dict = field(default_factory=dict)
    out: str = None

    def as_dict(self):
        d = {"experiment": self.experiment, "params": dict(self.params),
             "tolerances": dict(self.tolerances), "out": self.out}
        if self.sweep is not None:
            d["sweep"] = {k: getattr(self.sweep, k) for k in _SWEEP_KEYS}
        return d


def _unknown(kind, name, valid):
    return ConfigError(f"unknown {kind} {name!r}; valid: {', '.join(valid)}")


def _convert(section, key, raw, conv):
    try:
        if conv is int:
            f = float(raw)
            if f != int(f):
                raise ValueError("expected an integer")
            return int(f)
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None


def parse_config(text):
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    if "run" not in cp:
        raise ConfigError("missing [run] section")
    run = dict(cp["run"])
    for k in run:
        if k not in ("experiment", "out"):
            raise _unknown("key in [run]", k, ("experiment", "out"))
    tag = run.get("experiment", "").strip().lower()
    if tag not in SCHEMA:
        raise ConfigError(f"unknown experiment {tag!r}; valid: {', '.join(SCHEMA)}")
    allowed = ("run", tag, "sweep", "tolerances")
    for sec in cp.sections():
        if sec not in allowed:
            raise _unknown("section", sec, allowed)
    schema = SCHEMA[tag]
    params = {k: v[1] for k, v in schema.items()}
    if tag in cp:
        for k, raw in cp[tag].items():
            if k not in schema:
                raise _unknown(f"key in [{tag}]", k, schema)
            params[k] = _convert(tag, k, raw, schema[k][0])
    tols = {k: v[1] for k, v in TOLERANCE_KEYS.items()}
    if "tolerances" in cp:
        for k, raw in cp["tolerances"].items():
            if k not in TOLERANCE_KEYS:
                raise _unknown("key in [tolerances]", k, TOLERANCE_KEYS)
            tols[k] = _convert("tolerances", k, raw, float)
            if not tols[k] > 0:
                raise ConfigError(f"tolerance {k} must be positive")
    sweep = None
    if "sweep" in cp:
        s = dict(cp["sweep"])
        for k in s:
            if k not in _SWEEP_KEYS:
                raise _unknown("key in [sweep]", k, _SWEEP_KEYS)
        missing = [k for k in ("param", "start", "stop", "count") if k not in s]
        if missing:
            raise ConfigError(f"[sweep] is missing {', '.join(missing)}")
        if s["param"] not in schema:
            raise _unknown(f"sweep parameter for {tag}", s["param"], schema)
        conv = schema[s["param"]][0]
        if conv not in (float, int):
            raise ConfigError(f"parameter {s['param']!r} is not numeric and cannot be swept")
        sweep = SweepSpec(s["param"], _convert("sweep", "start", s["start"], float),
                          _convert("sweep", "stop", s["stop"], float),
                          _convert("sweep", "count", s["count"], int),
                          s.get("scale", "lin").strip().lower())
    return ExperimentConfig(tag, params, sweep, tols, run.get("out"))


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
