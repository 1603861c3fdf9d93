"""Experiment configuration files (YAML).

Schema (every key optional; omitted keys take the reference values)::

    earth:        {radius_km, grazing_altitude_km, c_m_per_s, gravitational_constant, earth_mass_kg}
    catalog:      path to a city catalogue, relative to the config file (default: bundled)
    cities:       {name: {lat_deg, lon_deg}}      # extra or overriding catalogue entries
    oftns:        [{name, refractive_index, delta_zigzag}]
    owsns:        [{name, altitude_km, lisl_range_km, gs_range_km, min_elevation_deg}]
    connections:  [{name, city_a, city_b, terrestrial_distance_km}]
    simulation:   {duration_s, dt_s, num_planes, sats_per_plane, inclination_deg,
                   phasing_factor, raan_span_deg, epoch_offset_s, workers}
    output_format: text | csv | json
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .catalog import CatalogError, CityCatalog, load_catalog, parse_catalog
from .compare import (
    REFERENCE_CONNECTIONS,
    REFERENCE_OFTNS,
    REFERENCE_OWSNS,
    ConnectionScenario,
    OftnConfig,
    OwsnConfig,
    SimulationConfig,
)
from .geo import EarthModel

OUTPUT_FORMATS = ("text", "csv", "json")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    earth: EarthModel = field(default_factory=EarthModel)
    catalog: str | None = None
    cities: dict[str, dict[str, float]] = field(default_factory=dict)
    oftns: list[OftnConfig] = field(default_factory=lambda: list(REFERENCE_OFTNS))
    owsns: list[OwsnConfig] = field(default_factory=lambda: list(REFERENCE_OWSNS))
    connections: list[ConnectionScenario] = field(default_factory=lambda: list(REFERENCE_CONNECTIONS))
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    output_format: str = "text"
    base_dir: Path = field(default=Path("."), compare=False, repr=False)

    def city_catalog(self) -> CityCatalog:
        if self.catalog is None:
            base = load_catalog()
        else:
            path = Path(self.catalog)
            base = load_catalog(path if path.is_absolute() else self.base_dir / path)
        if not self.cities:
            return base
        extra = parse_catalog(self.cities, "cities")
        return CityCatalog({**base.entries, **extra.entries}, {**base.descriptions, **extra.descriptions})

    def find_connection(self, name: str) -> ConnectionScenario:
        for c in self.connections:
            if c.name == name or f"{c.city_a}-{c.city_b}" == name:
                return c
        raise ConfigError(f"unknown connection {name!r}; known: {[c.name for c in self.connections]}")

    def find_owsn(self, name: str) -> OwsnConfig:
        for w in self.owsns:
            if w.name == name:
                return w
        raise ConfigError(f"unknown OWSN {name!r}; known: {[w.name for w in self.owsns]}")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"earth": dataclasses.asdict(self.earth)}
        if self.catalog is not None:
            out["catalog"] = self.catalog
        if self.cities:
            out["cities"] = {k: dict(v) for k, v in self.cities.items()}
        out["oftns"] = [dataclasses.asdict(o) for o in self.oftns]
        out["owsns"] = [dataclasses.asdict(w) for w in self.owsns]
        out["connections"] = [dataclasses.asdict(c) for c in self.connections]
        out["simulation"] = dataclasses.asdict(self.simulation)
        out["output_format"] = self.output_format
        return out

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
    for f in dataclasses.fields(cls):
        if f.name in data:
            _check_value(f, data[f.name], where)
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _build_list(cls, data, where: str) -> list:
    if not isinstance(data, list):
        raise ConfigError(f"{where}: expected a list")
    return [_build(cls, item, f"{where}[{k}]") for k, item in enumerate(data)]


_NUMERIC = {"float", "int", "float | None"}


def _check_value(f: dataclasses.Field, v, where: str) -> None:
    # annotations are strings here (postponed evaluation), so match on their text
    if f.type in _NUMERIC:
        if v is None and f.type.endswith("None"):
            return
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{where}.{f.name}: expected a number, got {v!r}")
        if f.type == "int" and not float(v).is_integer():
            raise ConfigError(f"{where}.{f.name}: expected an integer, got {v!r}")
    elif f.type == "str" and not isinstance(v, str):
        raise ConfigError(f"{where}.{f.name}: expected a string, got {v!r}")


def _check_numbers(obj, where: str) -> None:
    for f in dataclasses.fields(obj):
        _check_value(f, getattr(obj, f.name), where)


def config_from_dict(data: dict | None, base_dir: Path = Path(".")) -> ExperimentConfig:
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a mapping")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"base_dir"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"top level: unknown field(s) {', '.join(unknown)}")
    cfg = ExperimentConfig(base_dir=base_dir)
    if "earth" in data:
        cfg.earth = _build(EarthModel, data["earth"], "earth")
    cfg.catalog = data.get("catalog")
    cfg.cities = data.get("cities") or {}
    if "oftns" in data:
        cfg.oftns = _build_list(OftnConfig, data["oftns"], "oftns")
    if "owsns" in data:
        cfg.owsns = _build_list(OwsnConfig, data["owsns"], "owsns")
    if "connections" in data:
        cfg.connections = _build_list(ConnectionScenario, data["connections"], "connections")
    if "simulation" in data:
        cfg.simulation = _build(SimulationConfig, data["simulation"], "simulation")
    cfg.output_format = data.get("output_format", "text")
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    _check_numbers(cfg.earth, "earth")
    _check_numbers(cfg.simulation, "simulation")
    for group in ("oftns", "owsns", "connections"):
        seen = set()
        for k, item in enumerate(getattr(cfg, group)):
            _check_numbers(item, f"{group}[{k}]")
            if item.name in seen:
                raise ConfigError(f"{group}[{k}].name: duplicate name {item.name!r}")
            seen.add(item.name)
    for k, w in enumerate(cfg.owsns):
        try:
            w.resolved(cfg.earth)
        except ValueError as exc:
            raise ConfigError(f"owsns[{k}]: {exc}") from None
    sim = cfg.simulation
    if not (sim.duration_s > 0 and sim.dt_s > 0):
        raise ConfigError("simulation: duration_s and dt_s must be positive")
    if abs(sim.duration_s / sim.dt_s - round(sim.duration_s / sim.dt_s)) > 1e-9:
        raise ConfigError("simulation.duration_s: must be a multiple of dt_s")
    if sim.workers < 1:
        raise ConfigError("simulation.workers: must be at least 1")
    try:
        sim.walker(550.0)
    except ValueError as exc:
        raise ConfigError(f"simulation: {exc}") from None
    if cfg.output_format not in OUTPUT_FORMATS:
        raise ConfigError(f"output_format: must be one of {', '.join(OUTPUT_FORMATS)}")
    try:
        catalog = cfg.city_catalog()
    except (CatalogError, OSError) as exc:
        raise ConfigError(f"catalog: {exc}") from None
    for k, c in enumerate(cfg.connections):
        for key in ("city_a", "city_b"):
            if getattr(c, key) not in catalog:
                raise ConfigError(f"connections[{k}].{key}: {getattr(c, key)!r} is not in the city catalogue")
        if c.city_a == c.city_b:
            raise ConfigError(f"connections[{k}]: endpoints must differ")
        if c.terrestrial_distance_km is not None and not c.terrestrial_distance_km > 0:
            raise ConfigError(f"connections[{k}].terrestrial_distance_km: must be positive")


def load_config(path: str | Path | None = None) -> ExperimentConfig:
    """Read and validate a config file; ``None`` gives the reference experiment."""
    if path is None:
        return config_from_dict({})
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        raise ConfigError(f"{where}: {getattr(exc, 'problem', None) or exc}") from None
    try:
        return config_from_dict(data, path.parent)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
