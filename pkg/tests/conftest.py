import time

import pytest

from skyfiber.catalog import load_catalog
from skyfiber.compare import REFERENCE_CONNECTIONS, REFERENCE_OWSNS, SimulationConfig
from skyfiber.constellation import GroundStation
from skyfiber.linkgraph import simulate_connection

# one line per acceptance criterion, filled in by test_acceptance.py
CRITERIA: dict[str, list[tuple[bool, str]]] = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    CRITERIA.setdefault(criterion, []).append((ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(CRITERIA, key=lambda s: int(s.split()[0])):
        parts = CRITERIA[name]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {name}: " + "; ".join(d for _, d in parts))


class _SimulationCache:
    """Full-length reference simulations, run at most once per session."""

    def __init__(self):
        self.catalog = load_catalog()
        self.sim = SimulationConfig()
        self._runs = {}

    def get(self, connection: str, owsn: str):
        key = (connection, owsn)
        if key not in self._runs:
            conn = next(c for c in REFERENCE_CONNECTIONS if c.name == connection)
            net = next(w for w in REFERENCE_OWSNS if w.name == owsn).resolved()
            stations = tuple(
                GroundStation(n, self.catalog[n], net.gs_range_km, net.min_elevation_deg)
                for n in (conn.city_a, conn.city_b)
            )
            t0 = time.perf_counter()
            series = simulate_connection(
                self.sim.walker(net.altitude_km), stations, net.lisl_range_km, self.sim.duration_s, self.sim.dt_s
            )
            self._runs[key] = (series, time.perf_counter() - t0)
        return self._runs[key]


@pytest.fixture(scope="session")
def reference_runs():
    return _SimulationCache()
