"""Run configuration: one JSON document with optional ``simulation``,
``analysis`` and ``montecarlo`` sections. Unknown keys are rejected; omitted
keys fall back to the reference defaults. Parsing and serialization are exact
inverses, so parse -> serialize -> parse is a fixed point.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, DscError
from .montecarlo import DESK_GAMMA_LEVELS, DESK_SIGMA_LEVELS, MCGrid
from .pipeline import AnalysisConfig
from .signals import SimulationParams


@dataclass
class MonteCarloSettings:
    sigma_levels: tuple = DESK_SIGMA_LEVELS
    gamma_levels: tuple = DESK_GAMMA_LEVELS
    iterations: int = 20
    base_seed: int = 0
    detection_tolerance_hz: float = 0.5

    def __post_init__(self):
        self.sigma_levels = tuple(float(s) for s in self.sigma_levels)
        self.gamma_levels = tuple(float(g) for g in self.gamma_levels)


@dataclass
class RunConfig:
    simulation: SimulationParams = field(default_factory=SimulationParams)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    montecarlo: MonteCarloSettings = field(default_factory=MonteCarloSettings)

    def mc_grid(self, full: bool = False) -> MCGrid:
        mc = self.montecarlo
        if full:
            return MCGrid.full(base_seed=mc.base_seed, simulation=self.simulation,
                               analysis=self.analysis,
                               detection_tolerance_hz=mc.detection_tolerance_hz)
        return MCGrid(
            sigma_levels=mc.sigma_levels,
            gamma_levels=mc.gamma_levels,
            iterations=mc.iterations,
            base_seed=mc.base_seed,
            simulation=self.simulation,
            analysis=self.analysis,
            detection_tolerance_hz=mc.detection_tolerance_hz,
        )


def _from_mapping(cls, data: dict, path: str):
    """Build a dataclass from a mapping, recursing into nested dataclasses.

    Every config dataclass is constructible with no arguments, so a prototype
    instance tells us which fields are nested sections.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'} must be an object, got {type(data).__name__}")
    proto = cls()
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        here = f"{path}.{key}" if path else key
        if key not in names:
            raise ConfigError(f"unknown config key {here!r}")
        current = getattr(proto, key)
        if dataclasses.is_dataclass(current):
            kwargs[key] = _from_mapping(type(current), value, here)
        elif isinstance(current, tuple) and isinstance(value, list):
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except DscError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value in {path or 'config'}: {exc}") from exc


def _to_mapping(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _to_mapping(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, tuple):
        return [_to_mapping(v) for v in obj]
    return obj


def parse_config(data: dict) -> RunConfig:
    return _from_mapping(RunConfig, data, "")


def serialize_config(config: RunConfig) -> dict:
    return _to_mapping(config)


def load_config(path: str | Path | None) -> RunConfig:
    """Load a config file, or the defaults when ``path`` is None."""
    if path is None:
        return RunConfig()
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(data)
