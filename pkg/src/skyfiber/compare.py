"""Fibre-versus-satellite latency comparison and the crossover decision rule."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .catalog import CityCatalog
from .constellation import GroundStation, WalkerConfig
from .crossover import REFERENCE_MIN_ELEVATION_DEG, NoCrossoverError, average_crossover
from .geo import EARTH, EarthModel, max_lisl_range, slant_range
from .linkgraph import SlotSeries, simulate_connection

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OftnConfig:
    name: str
    refractive_index: float
    delta_zigzag: float = 0.0

    def __post_init__(self):
        if not self.refractive_index >= 1.0:
            raise ValueError(f"{self.name}: refractive index must be >= 1, got {self.refractive_index}")
        if self.delta_zigzag < 0:
            raise ValueError(f"{self.name}: zig-zag fraction must be non-negative")


@dataclass(frozen=True)
class OwsnConfig:
    """A satellite network: shell altitude plus link ranges.

    Ranges left as ``None`` are derived: the LISL range from the grazing
    line of sight, the station range from ``min_elevation_deg``.
    """

    name: str
    altitude_km: float
    lisl_range_km: float | None = None
    gs_range_km: float | None = None
    min_elevation_deg: float = REFERENCE_MIN_ELEVATION_DEG

    def resolved(self, earth: EarthModel = EARTH) -> "OwsnConfig":
        lisl_max = max_lisl_range(self.altitude_km, earth)
        lisl = lisl_max if self.lisl_range_km is None else self.lisl_range_km
        gs = slant_range(self.min_elevation_deg, self.altitude_km, earth)
        if self.gs_range_km is not None and abs(self.gs_range_km - gs) > 1.0:
            raise ValueError(
                f"{self.name}: gs_range_km {self.gs_range_km} disagrees with the slant range "
                f"{gs:.1f} km at {self.min_elevation_deg} deg elevation"
            )
        if lisl > lisl_max + 1.0:
            raise ValueError(f"{self.name}: LISL range {lisl} km exceeds line of sight {lisl_max:.0f} km")
        return OwsnConfig(self.name, self.altitude_km, lisl, gs, self.min_elevation_deg)


@dataclass(frozen=True)
class ConnectionScenario:
    name: str
    city_a: str
    city_b: str
    terrestrial_distance_km: float | None = None

    def distance_km(self, catalog: CityCatalog, earth: EarthModel = EARTH) -> float:
        d = self.terrestrial_distance_km
        if d is None:
            d = catalog.distance_km(self.city_a, self.city_b, earth)
        if not d > 0:
            raise ValueError(f"{self.name}: terrestrial distance must be positive")
        return d


@dataclass(frozen=True)
class SimulationConfig:
    duration_s: float = 3600.0
    dt_s: float = 1.0
    num_planes: int = 24
    sats_per_plane: int = 66
    inclination_deg: float = 53.0
    phasing_factor: int = 0
    raan_span_deg: float = 360.0
    epoch_offset_s: float = 0.0
    workers: int = 1

    def walker(self, altitude_km: float) -> WalkerConfig:
        return WalkerConfig(
            self.num_planes,
            self.sats_per_plane,
            self.inclination_deg,
            altitude_km,
            self.phasing_factor,
            self.raan_span_deg,
            self.epoch_offset_s,
        )


def oftn_latency(distance_km: float, cfg: OftnConfig, earth: EarthModel = EARTH) -> float:
    """One-way fibre latency in ms over ``distance_km`` (stretched by the zig-zag fraction)."""
    if distance_km < 0:
        raise ValueError("distance must be non-negative")
    return distance_km * (1.0 + cfg.delta_zigzag) * cfg.refractive_index * 1e6 / earth.c_m_per_s


def improvement_percent(t_oftn_ms: float, t_owsn_ms: float) -> float:
    """Latency saved by the satellite network, as a percentage of the fibre latency; negative when it loses."""
    return (t_oftn_ms - t_owsn_ms) / t_oftn_ms * 100.0


class Preference(enum.Enum):
    OWSN = "PreferOWSN"
    OFTN = "PreferOFTN"


@dataclass(frozen=True)
class CrossoverVerdict:
    preference: Preference
    terrestrial_distance_km: float
    average_d_crossover_km: float
    contradicted_by_simulation: bool | None = None


def crossover_verdict(
    terrestrial_distance_km: float,
    altitude_km: float,
    refractive_index: float,
    earth: EarthModel = EARTH,
    elevation_deg: float = REFERENCE_MIN_ELEVATION_DEG,
) -> CrossoverVerdict:
    """Prefer the satellite network iff the distance strictly exceeds the four-scenario average crossover distance."""
    row = average_crossover(altitude_km, refractive_index, earth, elevation_deg)
    avg = row.average_d_crossover_km
    if avg is None:
        raise NoCrossoverError(f"no crossover for h={altitude_km} km, i={refractive_index}")
    pref = Preference.OWSN if terrestrial_distance_km > avg else Preference.OFTN
    return CrossoverVerdict(pref, terrestrial_distance_km, avg)


@dataclass
class ComparisonReport:
    connections: list[ConnectionScenario]
    oftns: list[OftnConfig]
    owsns: list[OwsnConfig]
    distances_km: dict[str, float]
    latency_ms: dict[tuple[str, str], float | None]
    errors: dict[tuple[str, str], str] = field(default_factory=dict)
    series: dict[tuple[str, str], SlotSeries] = field(default_factory=dict, repr=False)
    verdicts: dict[tuple[str, str, str], CrossoverVerdict] = field(default_factory=dict)

    @property
    def networks(self) -> list[str]:
        return [o.name for o in self.oftns] + [w.name for w in self.owsns]

    def improvement(self, connection: str, owsn: str, oftn: str) -> float | None:
        t_f = self.latency_ms.get((connection, oftn))
        t_s = self.latency_ms.get((connection, owsn))
        if t_f is None or t_s is None:
            return None
        return improvement_percent(t_f, t_s)

    def improvements(self) -> dict[tuple[str, str, str], float | None]:
        return {
            (c.name, w.name, o.name): self.improvement(c.name, w.name, o.name)
            for c in self.connections
            for w in self.owsns
            for o in self.oftns
        }

    @property
    def warning_count(self) -> int:
        return len(self.errors)

    def rows(self) -> list[dict]:
        """Machine-readable rows: one per connection, latency per network then improvements."""
        out = []
        for c in self.connections:
            row = {"connection": c.name, "distance_km": round(self.distances_km[c.name])}
            for net in self.networks:
                v = self.latency_ms.get((c.name, net))
                row[net] = None if v is None else round(v, 2)
            for w in self.owsns:
                for o in self.oftns:
                    v = self.improvement(c.name, w.name, o.name)
                    row[f"{w.name}_vs_{o.name}_pct"] = None if v is None else round(v, 2)
            out.append(row)
        return out

    def render_text(self) -> str:
        nets = self.networks
        width = max([len(c.name) for c in self.connections] + [10])
        lines = ["Latency (ms)".ljust(width) + "".join(f"{n:>10}" for n in nets)]
        for c in self.connections:
            cells = []
            for n in nets:
                v = self.latency_ms.get((c.name, n))
                cells.append(f"{'ERR' if v is None else f'{v:.2f}':>10}")
            lines.append(c.name.ljust(width) + "".join(cells))
        if self.owsns and self.oftns:
            lines.append("")
            lines.append("Improvement of satellite over fibre (%)")
            for c in self.connections:
                for w in self.owsns:
                    parts = []
                    for o in self.oftns:
                        v = self.improvement(c.name, w.name, o.name)
                        parts.append(f"vs {o.name} {'n/a' if v is None else f'{v:+.2f}'}")
                    lines.append(f"  {c.name} {w.name}: " + ", ".join(parts))
        flagged = [(k, v) for k, v in self.verdicts.items() if v.contradicted_by_simulation]
        if flagged:
            lines.append("")
            lines.append("Crossover verdicts contradicted by simulation")
            for (conn, w, o), v in flagged:
                lines.append(
                    f"  {conn} {w} vs {o}: {v.preference.value} (distance {v.terrestrial_distance_km:.0f} km, "
                    f"average crossover {v.average_d_crossover_km:.0f} km)"
                )
        for (conn, net), msg in self.errors.items():
            lines.append(f"warning: {conn} {net}: {msg}")
        return "\n".join(lines)


def run_comparison(
    scenarios: Sequence[ConnectionScenario],
    oftns: Sequence[OftnConfig],
    owsns: Sequence[OwsnConfig],
    sim_cfg: SimulationConfig,
    catalog: CityCatalog,
    earth: EarthModel = EARTH,
) -> ComparisonReport:
    """Fill the connection x network latency matrix.

    A failing satellite cell is recorded in ``errors`` and left empty; the
    rest of the report is still produced.
    """
    report = ComparisonReport(list(scenarios), list(oftns), list(owsns), {}, {})
    for conn in scenarios:
        d = conn.distance_km(catalog, earth)
        report.distances_km[conn.name] = d
        for o in oftns:
            report.latency_ms[(conn.name, o.name)] = oftn_latency(d, o, earth)
        for w in owsns:
            key = (conn.name, w.name)
            try:
                net = w.resolved(earth)
                a = GroundStation(conn.city_a, catalog[conn.city_a], net.gs_range_km, net.min_elevation_deg)
                b = GroundStation(conn.city_b, catalog[conn.city_b], net.gs_range_km, net.min_elevation_deg)
                series = simulate_connection(
                    sim_cfg.walker(net.altitude_km),
                    (a, b),
                    net.lisl_range_km,
                    sim_cfg.duration_s,
                    sim_cfg.dt_s,
                    earth,
                    workers=sim_cfg.workers,
                )
                mean = series.mean_latency_ms
                if math.isnan(mean):
                    raise RuntimeError("no slot had a path")
                report.series[key] = series
                report.latency_ms[key] = mean
                if series.unreachable_count:
                    report.errors[key] = f"{series.unreachable_count} unreachable slots excluded"
            except Exception as exc:  # noqa: BLE001 - one bad cell must not sink the report
                log.warning("%s over %s failed: %s", conn.name, w.name, exc)
                report.latency_ms[key] = None
                report.errors[key] = str(exc)
        for w in owsns:
            for o in oftns:
                try:
                    v = crossover_verdict(d, w.altitude_km, o.refractive_index, earth, w.min_elevation_deg)
                except (NoCrossoverError, ValueError) as exc:
                    report.errors[(conn.name, f"{w.name}/{o.name}")] = str(exc)
                    continue
                t_s = report.latency_ms.get((conn.name, w.name))
                if t_s is not None:
                    owsn_won = t_s < report.latency_ms[(conn.name, o.name)]
                    contradicted = owsn_won != (v.preference is Preference.OWSN)
                    v = CrossoverVerdict(v.preference, v.terrestrial_distance_km, v.average_d_crossover_km, contradicted)
                report.verdicts[(conn.name, w.name, o.name)] = v
    return report


# Reference experiment: three fibre indices, three shell altitudes, three city pairs.
REFERENCE_OFTNS = (OftnConfig("OFTN1", 1.1), OftnConfig("OFTN2", 1.3), OftnConfig("OFTN3", 1.4675))
REFERENCE_OWSNS = (OwsnConfig("OWSN1", 300.0), OwsnConfig("OWSN2", 550.0), OwsnConfig("OWSN3", 1100.0))
REFERENCE_CONNECTIONS = (
    ConnectionScenario("New York-Dublin", "new_york", "dublin", 5121.0),
    ConnectionScenario("Sao Paulo-London", "sao_paulo", "london", 9514.0),
    ConnectionScenario("Toronto-Sydney", "toronto", "sydney", 15585.0),
)
