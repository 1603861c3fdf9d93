"""Walker-delta shells on circular orbits, propagated in an Earth-fixed frame.

Stations are fixed in ECEF; satellites are rotated by the Earth rotation
angle, so a single frame serves link discovery for every time slot.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geo import EARTH, Cartesian3, EarthModel, GeodeticPoint, geodetic_to_ecef, slant_range

EARTH_ROTATION_RAD_S = 7.2921159e-5


@dataclass(frozen=True)
class WalkerConfig:
    num_planes: int = 24
    sats_per_plane: int = 66
    inclination_deg: float = 53.0
    altitude_km: float = 550.0
    phasing_factor: int = 0
    raan_span_deg: float = 360.0
    epoch_offset_s: float = 0.0

    def __post_init__(self):
        if self.num_planes < 1 or self.sats_per_plane < 1:
            raise ValueError("a Walker shell needs at least one plane and one satellite per plane")
        if not 0.0 < self.inclination_deg < 180.0:
            raise ValueError(f"inclination must lie in (0, 180), got {self.inclination_deg}")
        if not 0 <= self.phasing_factor <= max(self.num_planes - 1, 0):
            raise ValueError(
                f"phasing factor must lie in [0, {self.num_planes - 1}], got {self.phasing_factor}"
            )
        if self.altitude_km <= 0:
            raise ValueError(f"altitude must be positive, got {self.altitude_km}")

    @property
    def total(self) -> int:
        return self.num_planes * self.sats_per_plane


@dataclass(frozen=True)
class SatelliteId:
    plane_index: int
    slot_index: int

    @property
    def label(self) -> str:
        return f"p{self.plane_index}s{self.slot_index}"

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class ShellElements:
    """Per-satellite initial elements, plane-major (index = plane * S + slot)."""

    config: WalkerConfig
    raan_deg: np.ndarray
    anomaly_deg: np.ndarray
    plane: np.ndarray
    slot: np.ndarray

    def __len__(self):
        return len(self.raan_deg)

    @property
    def ids(self) -> list[SatelliteId]:
        return [SatelliteId(int(p), int(s)) for p, s in zip(self.plane, self.slot)]

    @property
    def labels(self) -> list[str]:
        return [f"p{p}s{s}" for p, s in zip(self.plane, self.slot)]


@dataclass(frozen=True)
class SatelliteState:
    id: SatelliteId
    position_ecef: Cartesian3


@dataclass(frozen=True)
class GroundStation:
    name: str
    location: GeodeticPoint
    range_km: float
    min_elevation_deg: float = 25.0

    @classmethod
    def for_altitude(
        cls,
        name: str,
        location: GeodeticPoint,
        altitude_km: float,
        min_elevation_deg: float = 25.0,
        earth: EarthModel = EARTH,
    ) -> "GroundStation":
        return cls(name, location, slant_range(min_elevation_deg, altitude_km, earth), min_elevation_deg)


def generate_walker(config: WalkerConfig) -> ShellElements:
    P, S, F = config.num_planes, config.sats_per_plane, config.phasing_factor
    plane, slot = np.divmod(np.arange(P * S), S)
    raan = plane * (config.raan_span_deg / P)
    anomaly = slot * (360.0 / S) + plane * F * (360.0 / (P * S))
    return ShellElements(config, raan.astype(float), np.mod(anomaly, 360.0), plane, slot)


def orbital_velocity(altitude_km: float, earth: EarthModel = EARTH) -> float:
    """Circular orbital speed in km/s."""
    if altitude_km < 0:
        raise ValueError(f"altitude must be non-negative, got {altitude_km}")
    r_m = (earth.radius_km + altitude_km) * 1000.0
    return math.sqrt(earth.gravitational_constant * earth.earth_mass_kg / r_m) / 1000.0


def orbital_period(altitude_km: float, earth: EarthModel = EARTH) -> float:
    return 2.0 * math.pi * (earth.radius_km + altitude_km) / orbital_velocity(altitude_km, earth)


def inertial_positions(elements: ShellElements, t: float, earth: EarthModel = EARTH) -> np.ndarray:
    cfg = elements.config
    r = earth.radius_km + cfg.altitude_km
    rate = orbital_velocity(cfg.altitude_km, earth) / r
    t_eff = t + cfg.epoch_offset_s
    u = np.radians(elements.anomaly_deg) + rate * t_eff
    raan = np.radians(elements.raan_deg)
    inc = math.radians(cfg.inclination_deg)
    cu, su, co, so = np.cos(u), np.sin(u), np.cos(raan), np.sin(raan)
    return r * np.column_stack(
        (co * cu - so * su * math.cos(inc), so * cu + co * su * math.cos(inc), su * math.sin(inc))
    )


def propagate(elements: ShellElements, t: float, earth: EarthModel = EARTH) -> np.ndarray:
    """ECEF positions (km) of every satellite at ``t`` seconds after the epoch, shape ``(N, 3)``."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    xyz = inertial_positions(elements, t, earth)
    angle = -EARTH_ROTATION_RAD_S * (t + elements.config.epoch_offset_s)
    c, s = math.cos(angle), math.sin(angle)
    x, y = xyz[:, 0].copy(), xyz[:, 1].copy()
    xyz[:, 0] = c * x - s * y
    xyz[:, 1] = s * x + c * y
    return xyz


def satellite_states(elements: ShellElements, t: float, earth: EarthModel = EARTH) -> list[SatelliteState]:
    pos = propagate(elements, t, earth)
    return [SatelliteState(sid, Cartesian3(*map(float, p))) for sid, p in zip(elements.ids, pos)]


def station_positions(stations, earth: EarthModel = EARTH) -> np.ndarray:
    """ECEF positions of stations (or bare geodetic points), shape ``(k, 3)``."""
    pts = [getattr(s, "location", s) for s in stations]
    return np.array([geodetic_to_ecef(p, earth) for p in pts], dtype=float).reshape(-1, 3)
