"""Latency of long-haul fibre versus laser-linked LEO satellite networks.

The analytic side (:mod:`skyfiber.crossover`) finds the distance beyond which
a satellite path beats a fibre route; the simulation side
(:mod:`skyfiber.constellation`, :mod:`skyfiber.linkgraph`) routes real city
pairs over a Walker shell slot by slot; :mod:`skyfiber.compare` puts the two
together.
"""
from .catalog import CityCatalog, load_catalog
from .compare import (
    ConnectionScenario,
    OftnConfig,
    OwsnConfig,
    Preference,
    SimulationConfig,
    crossover_verdict,
    improvement_percent,
    oftn_latency,
    run_comparison,
)
from .constellation import GroundStation, WalkerConfig, generate_walker, orbital_velocity, propagate
from .crossover import (
    CrossoverQuery,
    NoCrossoverError,
    PerSlotCrossoverQuery,
    Scenario,
    average_crossover,
    emit_crossover_tables,
    solve_crossover,
    solve_per_slot_crossover,
)
from .geo import EARTH, EarthModel, GeodeticPoint, max_lisl_range, slant_range
from .linkgraph import PathResult, SlotSeries, Unreachable, build_graph, shortest_path, simulate_connection

__version__ = "0.1.0"

__all__ = [
    "CityCatalog", "load_catalog",
    "ConnectionScenario", "OftnConfig", "OwsnConfig", "Preference", "SimulationConfig",
    "crossover_verdict", "improvement_percent", "oftn_latency", "run_comparison",
    "GroundStation", "WalkerConfig", "generate_walker", "orbital_velocity", "propagate",
    "CrossoverQuery", "NoCrossoverError", "PerSlotCrossoverQuery", "Scenario",
    "average_crossover", "emit_crossover_tables", "solve_crossover", "solve_per_slot_crossover",
    "EARTH", "EarthModel", "GeodeticPoint", "max_lisl_range", "slant_range",
    "PathResult", "SlotSeries", "Unreachable", "build_graph", "shortest_path", "simulate_connection",
]
