"""Run configuration: defaults, validation, and flat key = value files.

Config files are one `key = value` per line with `#` comments.  Keys carry
the conventional symbol names of the data set (mu_o, s_ra, alpha0, c0, Q,
dt, ...), so a config file reads like the parameter table it encodes.
Values may be integers, floats, or simple fractions such as 2/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .petro import PetroModel
from .pressure import WellConfig

__all__ = ["ConfigError", "RunConfig", "parse_config", "parse_value"]


class ConfigError(ValueError):
    """Bad key, bad value, or physically inconsistent configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one quarter five-spot run.

    Phase and capillary parameters default to the classic polymer flood
    data set.  The injection rate is measured in pore volumes per unit
    time; the default floods a noticeable fraction of the domain by t = 1,
    which keeps desk-scale refinement studies meaningful.
    """

    # discretization
    N: int = 32                 # cells per direction, h = 1/N
    dt: float = 1.0 / 50.0
    tstop: float = 2.0

    # rock and fluids
    phi: float = 1.0
    K: float = 1.0
    mu_w: float = 1.26
    mu_o: float = 12.6
    s_ra: float = 0.1
    s_ro: float = 0.2
    alpha0: float = 0.125
    m: float = 2.0 / 3.0
    beta: float = 15.0
    eps_sat: float = 1e-6

    # scenario
    Q: float = 2.0              # injection rate (pore volumes per unit time)
    c0: float = 0.1             # injected polymer concentration
    s0: float = 0.21            # initial resident water saturation
    radius: float = 0.44        # initial flooded quarter-disc radius
    well_radius: float = 0.0    # well footprint; 0 = corner point sources
    threshold: float = -1.0     # breakthrough saturation; < 0 means 1 - s0

    # numerics and output
    pressure_tol: float = 1e-10
    transport_tol: float = 1e-12
    dump_every: int = 0         # dump cadence in steps; 0 = final state only
    out: str = ""

    def __post_init__(self):
        if self.N < 2:
            raise ConfigError("N must be at least 2")
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.tstop < 0.0:
            raise ConfigError("tstop must be nonnegative")
        if self.Q < 0.0:
            raise ConfigError("Q must be nonnegative")
        if self.c0 < 0.0:
            raise ConfigError("c0 must be nonnegative")
        if not 0.0 < self.radius <= math.sqrt(2.0):
            raise ConfigError("radius must lie in (0, sqrt(2)]")
        if not 0.0 <= self.well_radius <= 0.5:
            raise ConfigError("well_radius must lie in [0, 0.5]")
        if self.dump_every < 0:
            raise ConfigError("dump_every must be nonnegative")
        if not (self.pressure_tol > 0.0 and self.transport_tol > 0.0):
            raise ConfigError("solver tolerances must be positive")
        try:
            model = self.petro()
        except ValueError as err:
            raise ConfigError(str(err)) from err
        if not model.s_ra <= self.s0 <= 1.0 - model.s_ro:
            raise ConfigError("s0 must lie in the mobile range "
                              f"[{model.s_ra}, {1.0 - model.s_ro}]")
        thr = self.breakthrough_threshold
        if not 0.0 < thr < 1.0:
            raise ConfigError("threshold must lie in (0, 1)")

    def petro(self) -> PetroModel:
        return PetroModel(mu_w=self.mu_w, mu_o=self.mu_o, s_ra=self.s_ra,
                          s_ro=self.s_ro, m=self.m, alpha0=self.alpha0,
                          beta=self.beta, eps_sat=self.eps_sat)

    def wells(self) -> WellConfig:
        return WellConfig(rate=self.Q, c_injected=self.c0,
                          radius=self.well_radius)

    @property
    def breakthrough_threshold(self) -> float:
        return self.threshold if self.threshold >= 0.0 else 1.0 - self.s0


_INT_KEYS = {"N", "dump_every"}
_STR_KEYS = {"out"}
_VALID_KEYS = {f.name for f in fields(RunConfig)}


def parse_value(text: str):
    """Parse an int, float, or simple fraction like 2/3; plain text falls
    through unchanged."""
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError):
            pass
    return text


def parse_config(path, overrides: dict | None = None) -> RunConfig:
    """Read a config file (optional) and apply overrides on top of defaults."""
    values: dict = {}
    if path is not None:
        text = Path(path).read_text()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _VALID_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
            values[key] = val.strip() if key in _STR_KEYS else parse_value(val)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    for key in values:
        if key not in _VALID_KEYS:
            raise ConfigError(f"unknown config key '{key}'")
        if key in _INT_KEYS:
            if not isinstance(values[key], int):
                raise ConfigError(f"config key '{key}' wants an integer, "
                                  f"got {values[key]!r}")
        elif key not in _STR_KEYS and not isinstance(values[key], (int, float)):
            raise ConfigError(f"config key '{key}' wants a number, "
                              f"got {values[key]!r}")
    try:
        return RunConfig(**values)
    except TypeError as err:
        raise ConfigError(str(err)) from err
