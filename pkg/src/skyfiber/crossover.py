"""Crossover functions: when does a laser satellite path beat a fibre path?

The crossover function is the ratio of the satellite-network latency to the
fibre latency between two surface points separated by a central angle
``theta``.  Below 1 the satellite network wins.  Four satellite geometries are
modelled (zenith satellites, and three placements at a minimum elevation
angle), plus a variant with separate ingress/egress elevations and a fibre
detour factor.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .geo import EARTH, EarthModel, arc_length, chord_length, cosine_offset, slant_range

THETA_LO_DEG = 1e-6
THETA_HI_DEG = 360.0
BISECTION_XTOL_DEG = 1e-10

# The grid used for the published tables.
REFERENCE_ALTITUDES_KM = (300.0, 500.0, 550.0, 700.0, 900.0, 1100.0)
REFERENCE_INDICES = (1.5, 1.4675, 1.4, 1.3, 1.2, 1.1)
REFERENCE_MIN_ELEVATION_DEG = 25.0


class Scenario(enum.IntEnum):
    """Satellite placement relative to the zenith positions above each endpoint.

    S1: both satellites at zenith.  S2: both displaced outward (longest path).
    S3: both displaced inward (shortest).  S4: displaced the same way, so the
    offsets cancel.
    """

    S1 = 1
    S2 = 2
    S3 = 3
    S4 = 4


class NoCrossoverError(ValueError):
    pass


@dataclass(frozen=True)
class CrossoverQuery:
    altitude_km: float
    refractive_index: float
    elevation_deg: float = REFERENCE_MIN_ELEVATION_DEG
    scenario: Scenario = Scenario.S1
    earth: EarthModel = EARTH

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if self.scenario is Scenario.S1:
            object.__setattr__(self, "elevation_deg", 90.0)
        if not self.altitude_km > 0:
            raise ValueError(f"altitude must be positive, got {self.altitude_km}")
        if not self.refractive_index >= 1.0:
            raise ValueError(f"refractive index must be >= 1, got {self.refractive_index}")
        if not 0.0 <= self.elevation_deg <= 90.0:
            raise ValueError(f"elevation must lie in [0, 90], got {self.elevation_deg}")

    @property
    def alpha_deg(self) -> float:
        return 90.0 - self.elevation_deg

    @property
    def gs_range_km(self) -> float:
        return slant_range(self.elevation_deg, self.altitude_km, self.earth)

    @property
    def offset_km(self) -> float:
        return cosine_offset(self.altitude_km, self.gs_range_km, self.alpha_deg)


@dataclass(frozen=True)
class CrossoverResult:
    theta_crossover_deg: float
    distance_crossover_km: float
    gs_range_km: float
    query: CrossoverQuery | None = field(default=None, compare=False, repr=False)

    found = True


@dataclass(frozen=True)
class NoCrossover:
    """No sign change of ``f - 1`` inside the search bracket.

    ``ratio_lo`` and ``ratio_hi`` are the crossover-function values at the
    bracket ends; ``ratio_lo <= 1`` means the satellite path already wins at
    vanishing separation.
    """

    ratio_lo: float
    ratio_hi: float
    gs_range_km: float
    query: CrossoverQuery | None = field(default=None, compare=False, repr=False)

    found = False
    theta_crossover_deg = None
    distance_crossover_km = None


def owsn_distance(theta_deg, query: CrossoverQuery):
    """End-to-end ground-to-ground path length over the satellite network."""
    chord = chord_length(theta_deg, query.altitude_km, query.earth)
    if query.scenario is Scenario.S1:
        return 2.0 * query.altitude_km + chord
    r_gs = query.gs_range_km
    if query.scenario is Scenario.S4:
        return 2.0 * r_gs + chord
    off = query.offset_km
    sign = 1.0 if query.scenario is Scenario.S2 else -1.0
    return 2.0 * r_gs + chord + sign * 2.0 * off


def _check_theta(theta_deg):
    if np.any(np.asarray(theta_deg) <= 0.0):
        raise ValueError("theta must be strictly positive (the fibre arc vanishes at 0)")


def crossover_function(theta_deg, query: CrossoverQuery):
    """Satellite/fibre latency ratio at central angle ``theta_deg``."""
    _check_theta(theta_deg)
    fibre = arc_length(theta_deg, query.earth) * query.refractive_index
    return owsn_distance(theta_deg, query) / fibre


def bisect_decreasing(f: Callable[[float], float], lo: float, hi: float, xtol: float) -> float:
    """Root of ``f`` on ``[lo, hi]`` assuming ``f(lo) > 0 >= f(hi)``."""
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve(ratio: Callable[[float], float], gs_range_km: float, query, earth: EarthModel):
    f_lo, f_hi = ratio(THETA_LO_DEG), ratio(THETA_HI_DEG)
    if not (f_lo > 1.0 and f_hi <= 1.0):
        return NoCrossover(f_lo, f_hi, gs_range_km, query)
    theta = bisect_decreasing(lambda t: ratio(t) - 1.0, THETA_LO_DEG, THETA_HI_DEG, BISECTION_XTOL_DEG)
    return CrossoverResult(theta, arc_length(theta, earth), gs_range_km, query)


def solve_crossover(query: CrossoverQuery) -> CrossoverResult | NoCrossover:
    """Crossover angle and distance by bisection on ``(1e-6, 360]`` degrees."""
    return _solve(
        lambda t: float(crossover_function(t, query)), query.gs_range_km, query, query.earth
    )


@dataclass(frozen=True)
class CrossoverTableRow:
    altitude_km: float
    refractive_index: float
    gs_range_km: float
    results: dict[Scenario, CrossoverResult | NoCrossover]

    @property
    def complete(self) -> bool:
        return all(r.found for r in self.results.values())

    @property
    def average_d_crossover_km(self) -> float | None:
        if not self.complete:
            return None
        return float(np.mean([self.results[s].distance_crossover_km for s in Scenario]))


def average_crossover(
    altitude_km: float,
    refractive_index: float,
    earth: EarthModel = EARTH,
    elevation_deg: float = REFERENCE_MIN_ELEVATION_DEG,
) -> CrossoverTableRow:
    results = {
        s: solve_crossover(CrossoverQuery(altitude_km, refractive_index, elevation_deg, s, earth))
        for s in Scenario
    }
    return CrossoverTableRow(
        altitude_km, refractive_index, slant_range(elevation_deg, altitude_km, earth), results
    )


def emit_crossover_tables(
    h_list: Sequence[float],
    i_list: Sequence[float],
    earth: EarthModel = EARTH,
    elevation_deg: float = REFERENCE_MIN_ELEVATION_DEG,
) -> list[CrossoverTableRow]:
    """One row per ``(h, i)`` pair, altitude-major like the published tables."""
    if len(h_list) == 0 or len(i_list) == 0:
        raise ValueError("altitude and refractive-index lists must be non-empty")
    return [average_crossover(h, i, earth, elevation_deg) for h in h_list for i in i_list]


# -- per-slot elevation variant ---------------------------------------------


@dataclass(frozen=True)
class PerSlotCrossoverQuery:
    """Scenario-2 geometry with independent ingress/egress elevations and a fibre detour.

    ``offset_combination`` selects how the two displacement terms enter the
    path length: ``"sum"`` adds them (reduces to Scenario 2 when both
    elevations match), ``"rss"`` takes their root-sum-square.
    """

    base: CrossoverQuery
    ingress_elevation_deg: float
    egress_elevation_deg: float
    zigzag_delta: float = 0.0
    offset_combination: str = "sum"

    def __post_init__(self):
        for e in (self.ingress_elevation_deg, self.egress_elevation_deg):
            if not 0.0 <= e <= 90.0:
                raise ValueError(f"elevation must lie in [0, 90], got {e}")
        if self.zigzag_delta < 0:
            raise ValueError(f"zig-zag fraction must be non-negative, got {self.zigzag_delta}")
        if self.offset_combination not in ("sum", "rss"):
            raise ValueError(f"unknown offset combination {self.offset_combination!r}")

    def _leg(self, elevation_deg: float) -> tuple[float, float]:
        h, earth = self.base.altitude_km, self.base.earth
        r = slant_range(elevation_deg, h, earth)
        return r, cosine_offset(h, r, 90.0 - elevation_deg)

    def owsn_distance(self, theta_deg):
        r1, o1 = self._leg(self.ingress_elevation_deg)
        r2, o2 = self._leg(self.egress_elevation_deg)
        offsets = o1 + o2 if self.offset_combination == "sum" else math.hypot(o1, o2)
        return r1 + r2 + chord_length(theta_deg, self.base.altitude_km, self.base.earth) + offsets


def per_slot_crossover_function(theta_deg, query: PerSlotCrossoverQuery):
    _check_theta(theta_deg)
    b = query.base
    fibre = arc_length(theta_deg, b.earth) * (1.0 + query.zigzag_delta) * b.refractive_index
    return query.owsn_distance(theta_deg) / fibre


def solve_per_slot_crossover(query: PerSlotCrossoverQuery) -> CrossoverResult | NoCrossover:
    """Root of the per-slot variant.  The reported distance is the surface arc, without the detour."""
    r1 = slant_range(query.ingress_elevation_deg, query.base.altitude_km, query.base.earth)
    r2 = slant_range(query.egress_elevation_deg, query.base.altitude_km, query.base.earth)
    return _solve(
        lambda t: float(per_slot_crossover_function(t, query)),
        0.5 * (r1 + r2),
        query,
        query.base.earth,
    )


# -- sweeps for plotting ------------------------------------------------------


def function_sweep(query: CrossoverQuery, thetas: Iterable[float]) -> list[tuple[float, float]]:
    thetas = np.asarray(list(thetas), dtype=float)
    return list(zip(thetas.tolist(), np.atleast_1d(crossover_function(thetas, query)).tolist()))

