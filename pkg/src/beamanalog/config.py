"""Project configuration: a nested YAML document validated into dataclasses.

Schema (units in brackets; every block required unless marked optional)::

    beam:
      length [m], width [m], thickness [m]      # rectangular solid section
      E [Pa] = 69e9, density [kg/m^3] = 2700    # optional, aluminium defaults
      t0 [s] = 1.0                              # optional characteristic time
    actuator:
      K_ee [F], l_p [m], V_max [V]
      K_mm [N m/rad] = 0                        # optional
      K_me, K_em [C/rad]                        # optional; back-solved if absent
      target_rho_over_beta = 0.0625             # used when K_me/K_em absent
      neglect_layer_stiffness = true            # optional
    synthesis:
      n_modules, C1 [F], kappa0, kappainf
    simulation:
      modes: [int, ...]
      initial: {kind: mode|triangle, amplitude_fraction, mode?, peak?}
      t_end [tau] (optional), dt [tau] (optional), rho (optional override)
    output: directory (optional, default "out")
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .beam_core import BeamSpec
from .piezo import ActuatorSpec, required_K_em


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


DEFAULT_CONFIG: dict = {
    "beam": {"length": 1.0, "width": 0.03, "thickness": 0.002, "E": 69e9, "density": 2700.0, "t0": 1.0},
    "actuator": {
        "K_ee": 100e-9,
        "l_p": 0.1,
        "V_max": 200.0,
        "K_mm": 0.0,
        "target_rho_over_beta": 1.0 / 16.0,
        "neglect_layer_stiffness": True,
    },
    "synthesis": {"n_modules": 10, "C1": 100e-9, "kappa0": math.sqrt(2.0), "kappainf": math.sqrt(2.0)},
    "simulation": {"modes": [1], "initial": {"kind": "mode", "mode": 1, "amplitude_fraction": 0.01}},
    "output": "out",
}


@dataclass
class SynthesisConfig:
    n_modules: int
    C1: float
    kappa0: float
    kappainf: float


@dataclass
class SimulationConfig:
    modes: list
    initial: dict
    t_end: Optional[float] = None
    dt: Optional[float] = None
    rho: Optional[float] = None


@dataclass
class ProjectConfig:
    beam: BeamSpec
    actuator: ActuatorSpec
    synthesis: SynthesisConfig
    simulation: SimulationConfig
    output: Path = Path("out")
    neglect_layer_stiffness: bool = True
    raw: dict = field(default_factory=dict, repr=False)


def _get(block: Any, path: str, key: str, kind=float, default=..., positive=False):
    full = f"{path}.{key}"
    if not isinstance(block, dict):
        raise ConfigError(path, "expected a mapping")
    if key not in block or block[key] is None:
        if default is ...:
            raise ConfigError(full, "missing required field")
        return default
    value = block[key]
    try:
        if kind is int:
            if isinstance(value, bool) or int(value) != value:
                raise ValueError
            value = int(value)
        elif kind is float:
            if isinstance(value, bool):
                raise ValueError
            value = float(value)
        elif kind is bool:
            if not isinstance(value, bool):
                raise ValueError
    except (TypeError, ValueError):
        raise ConfigError(full, f"expected {kind.__name__}, got {value!r}") from None
    if positive and not value > 0:
        raise ConfigError(full, f"must be positive, got {value!r}")
    return value


def _block(raw: dict, key: str) -> dict:
    if key not in raw:
        raise ConfigError(key, "missing required block")
    if not isinstance(raw[key], dict):
        raise ConfigError(key, "expected a mapping")
    return raw[key]


def parse_config(raw: dict) -> ProjectConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a mapping")
    b = _block(raw, "beam")
    beam = BeamSpec.rectangular(
        _get(b, "beam", "length", positive=True),
        _get(b, "beam", "width", positive=True),
        _get(b, "beam", "thickness", positive=True),
        E=_get(b, "beam", "E", default=69e9, positive=True),
        density=_get(b, "beam", "density", default=2700.0, positive=True),
        t0=_get(b, "beam", "t0", default=1.0, positive=True),
    )

    a = _block(raw, "actuator")
    neglect = _get(a, "actuator", "neglect_layer_stiffness", kind=bool, default=True)
    K_mm = _get(a, "actuator", "K_mm", default=0.0)
    K_ee = _get(a, "actuator", "K_ee", positive=True)
    l_p = _get(a, "actuator", "l_p", positive=True)
    V_max = _get(a, "actuator", "V_max", positive=True)
    K_me = _get(a, "actuator", "K_me", default=None)
    K_em = _get(a, "actuator", "K_em", default=None)
    if K_me is None and K_em is None:
        ratio = _get(a, "actuator", "target_rho_over_beta", default=1.0 / 16.0)
        if ratio < 0:
            raise ConfigError("actuator.target_rho_over_beta", "must be non-negative")
        probe = ActuatorSpec(K_mm, 0.0, 0.0, K_ee, l_p, V_max)
        k = required_K_em(ratio * beam.beta, probe, beam, neglect)
        K_me, K_em = k, -k
    elif K_me is None or K_em is None:
        missing = "K_me" if K_me is None else "K_em"
        raise ConfigError(f"actuator.{missing}", "give both K_me and K_em, or neither")
    actuator = ActuatorSpec(K_mm, K_me, K_em, K_ee, l_p, V_max)

    s = _block(raw, "synthesis")
    synthesis = SynthesisConfig(
        n_modules=_get(s, "synthesis", "n_modules", kind=int),
        C1=_get(s, "synthesis", "C1", positive=True),
        kappa0=_get(s, "synthesis", "kappa0", positive=True),
        kappainf=_get(s, "synthesis", "kappainf", positive=True),
    )

    m = _block(raw, "simulation")
    modes = m.get("modes")
    if not isinstance(modes, list) or not modes or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in modes):
        raise ConfigError("simulation.modes", f"expected a non-empty list of integers >= 1, got {modes!r}")
    initial = m.get("initial")
    if not isinstance(initial, dict):
        raise ConfigError("simulation.initial", "missing required block")
    kind = initial.get("kind")
    if kind not in ("mode", "triangle"):
        raise ConfigError("simulation.initial.kind", f"expected 'mode' or 'triangle', got {kind!r}")
    _get(initial, "simulation.initial", "amplitude_fraction")
    if kind == "mode":
        _get(initial, "simulation.initial", "mode", kind=int, default=1)
    else:
        peak = _get(initial, "simulation.initial", "peak", default=0.5)
        if not 0 < peak < 1:
            raise ConfigError("simulation.initial.peak", "must lie strictly inside (0, 1)")
    rho = _get(m, "simulation", "rho", default=None)
    if rho is not None and rho < 0:
        raise ConfigError("simulation.rho", "must be non-negative")
    simulation = SimulationConfig(
        modes=sorted(set(modes)),
        initial=dict(initial),
        t_end=_get(m, "simulation", "t_end", default=None, positive=True),
        dt=_get(m, "simulation", "dt", default=None, positive=True),
        rho=rho,
    )
    output = raw.get("output", "out")
    if not isinstance(output, str):
        raise ConfigError("output", "expected a directory path string")
    return ProjectConfig(beam, actuator, synthesis, simulation, Path(output), neglect, raw)


def load_config(path=None) -> ProjectConfig:
    """Read a YAML config; ``None`` gives the built-in aluminium example."""
    if path is None:
        return parse_config(copy.deepcopy(DEFAULT_CONFIG))
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"invalid YAML: {exc}") from exc
    return parse_config(raw)
