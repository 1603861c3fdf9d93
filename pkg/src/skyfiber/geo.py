"""Spherical-Earth geometry shared by the crossover engine and the simulator.

All angles are in degrees at the API boundary; lengths are in kilometres
unless the name says otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class EarthModel:
    radius_km: float = 6378.0
    grazing_altitude_km: float = 80.0
    c_m_per_s: float = 299_792_458.0
    gravitational_constant: float = 6.673e-11
    earth_mass_kg: float = 5.98e24

    def __post_init__(self):
        if not self.radius_km > 0:
            raise ValueError(f"radius_km must be positive, got {self.radius_km}")
        if not 0 <= self.grazing_altitude_km < self.radius_km:
            raise ValueError(
                f"grazing_altitude_km must lie in [0, radius_km), got {self.grazing_altitude_km}"
            )
        if not self.c_m_per_s > 0:
            raise ValueError(f"c_m_per_s must be positive, got {self.c_m_per_s}")

    @property
    def c_km_per_s(self) -> float:
        return self.c_m_per_s / 1000.0

    def latency_ms(self, length_km):
        """Vacuum propagation delay of a path of the given length."""
        return _scalar_or_array(np.asarray(length_km, dtype=float) * 1e6 / self.c_m_per_s)


EARTH = EarthModel()


def _scalar_or_array(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class GeodeticPoint:
    lat_deg: float
    lon_deg: float

    def __post_init__(self):
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat_deg}")
        if not -180.0 <= self.lon_deg <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon_deg}")


class Cartesian3(NamedTuple):
    """Earth-centred position in km."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


def central_angle(a: GeodeticPoint, b: GeodeticPoint) -> float:
    """Earth-centred angle between two surface points, in degrees (haversine form)."""
    lat1, lat2 = math.radians(a.lat_deg), math.radians(b.lat_deg)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon_deg - a.lon_deg)
    hav = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return math.degrees(2.0 * math.asin(min(1.0, math.sqrt(hav))))


def arc_length(theta_deg, earth: EarthModel = EARTH):
    """Great-circle arc on the Earth's surface subtending ``theta_deg``."""
    return _scalar_or_array(2.0 * np.pi * earth.radius_km * (np.asarray(theta_deg, dtype=float) / 360.0))


def chord_length(theta_deg, altitude_km: float, earth: EarthModel = EARTH):
    """Straight line between two points at ``altitude_km`` separated by ``theta_deg``."""
    theta = np.asarray(theta_deg, dtype=float)
    return _scalar_or_array(2.0 * (earth.radius_km + altitude_km) * np.sin((theta / 2.0) * (np.pi / 180.0)))


def slant_range(elevation_deg: float, altitude_km: float, earth: EarthModel = EARTH) -> float:
    """Ground-station-to-satellite distance at the given elevation angle.

    At 90 degrees this returns ``altitude_km`` exactly, so the zenith case does
    not pick up rounding from the general formula.
    """
    if not 0.0 <= elevation_deg <= 90.0:
        raise ValueError(f"elevation must lie in [0, 90], got {elevation_deg}")
    if elevation_deg == 90.0:
        return float(altitude_km)
    R = earth.radius_km
    eps = math.radians(elevation_deg)
    return R * (math.sqrt(((R + altitude_km) / R) ** 2 - math.cos(eps) ** 2) - math.sin(eps))


def cosine_offset(altitude_km: float, gs_range_km: float, alpha_deg: float) -> float:
    """Third side of the triangle with sides ``altitude_km``, ``gs_range_km`` and included angle ``alpha_deg``."""
    if altitude_km < 0 or gs_range_km < 0:
        raise ValueError("altitude and ground-station range must be non-negative")
    sq = (
        altitude_km ** 2
        + gs_range_km ** 2
        - 2.0 * altitude_km * gs_range_km * math.cos(alpha_deg * (math.pi / 180.0))
    )
    # coincident sides can round to a tiny negative value
    return math.sqrt(max(sq, 0.0))


def max_lisl_range(altitude_km: float, earth: EarthModel = EARTH) -> float:
    """Longest satellite-to-satellite line of sight that stays above the grazing shell."""
    if altitude_km <= earth.grazing_altitude_km:
        raise ValueError(
            f"altitude {altitude_km} km is not above the grazing altitude "
            f"{earth.grazing_altitude_km} km; no line of sight exists"
        )
    r = earth.radius_km + altitude_km
    g = earth.radius_km + earth.grazing_altitude_km
    return 2.0 * math.sqrt(r * r - g * g)


def geodetic_to_ecef(p: GeodeticPoint, earth: EarthModel = EARTH) -> Cartesian3:
    lat, lon = math.radians(p.lat_deg), math.radians(p.lon_deg)
    R = earth.radius_km
    return Cartesian3(
        R * math.cos(lat) * math.cos(lon),
        R * math.cos(lat) * math.sin(lon),
        R * math.sin(lat),
    )


def segment_clearance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Smallest distance from the Earth's centre to each segment ``a[k]``-``b[k]``.

    Works row-wise on ``(n, 3)`` arrays (or single 3-vectors).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = np.einsum("...i,...i->...", ab, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = -np.einsum("...i,...i->...", a, ab) / denom
    t = np.clip(np.nan_to_num(t, nan=0.0), 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(closest, axis=-1)
