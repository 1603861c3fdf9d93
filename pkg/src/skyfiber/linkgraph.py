"""Per-slot link graphs and minimum-latency routing between two ground stations."""
from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .constellation import GroundStation, WalkerConfig, generate_walker, propagate, station_positions
from .geo import EARTH, EarthModel, max_lisl_range, segment_clearance

log = logging.getLogger(__name__)

# Relative slack when deciding that two path latencies are equal.
TIE_RTOL = 1e-12


class Unreachable(Exception):
    """No ground-to-ground path exists in this slot."""


@dataclass
class LinkGraph:
    """Undirected graph over satellites (indices ``0..N-1``) then stations (``N..``).

    ``lengths`` holds link lengths in km as a symmetric sparse matrix; the
    routing weight is the vacuum latency derived from it.
    """

    labels: list[str]
    positions: np.ndarray
    lengths: csr_matrix
    num_satellites: int
    c_m_per_s: float = EARTH.c_m_per_s

    def __post_init__(self):
        self._index = {lab: k for k, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("node labels must be unique")

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def station_nodes(self) -> range:
        return range(self.num_satellites, self.num_nodes)

    @property
    def latencies(self) -> csr_matrix:
        """Link latencies in seconds."""
        return self.lengths * (1000.0 / self.c_m_per_s)

    def index(self, node: str | int) -> int:
        if isinstance(node, (int, np.integer)):
            if not 0 <= node < self.num_nodes:
                raise KeyError(f"node index {node} out of range")
            return int(node)
        return self._index[node]

    def is_station(self, node: str | int) -> bool:
        return self.index(node) >= self.num_satellites

    def edges(self):
        """Yield ``(u, v, length_km, latency_s)`` once per undirected link, ``u < v``."""
        upper = self.lengths.tocoo()
        for u, v, d in zip(upper.row, upper.col, upper.data):
            if u < v:
                yield int(u), int(v), float(d), float(d) * 1000.0 / self.c_m_per_s

    def edge_length(self, u: int, v: int) -> float:
        d = self.lengths[u, v]
        if d == 0:
            raise KeyError(f"no link between {self.labels[u]} and {self.labels[v]}")
        return float(d)

    def neighbors(self, node: str | int) -> np.ndarray:
        u = self.index(node)
        return self.lengths.indices[self.lengths.indptr[u] : self.lengths.indptr[u + 1]]


def _satellite_pairs(pos: np.ndarray, max_range: float, method: str) -> tuple[np.ndarray, np.ndarray]:
    if method == "kdtree":
        pairs = cKDTree(pos).query_pairs(max_range, output_type="ndarray")
        if len(pairs) == 0:
            return np.empty((0, 2), dtype=np.intp), np.empty(0)
        d = np.linalg.norm(pos[pairs[:, 0]] - pos[pairs[:, 1]], axis=1)
    elif method == "brute":
        full = cdist(pos, pos)
        i, j = np.triu_indices(len(pos), k=1)
        d = full[i, j]
        pairs = np.column_stack((i, j))
    else:
        raise ValueError(f"unknown pair method {method!r}")
    keep = d <= max_range
    return pairs[keep], d[keep]


def build_graph(
    sat_positions: np.ndarray,
    stations: Sequence[GroundStation],
    lisl_range_km: float,
    earth: EarthModel = EARTH,
    sat_labels: Sequence[str] | None = None,
    station_ecef: np.ndarray | None = None,
    method: str = "kdtree",
) -> LinkGraph:
    """Link graph for one snapshot.

    Satellites link when closer than ``lisl_range_km`` and the line of sight
    clears the grazing shell; a station links to every satellite within its
    ``range_km``.  ``method`` picks the candidate-pair search (``"kdtree"``
    or ``"brute"``); both produce the same edge set.
    """
    pos = np.asarray(sat_positions, dtype=float).reshape(-1, 3)
    n = len(pos)
    if n == 0:
        raise ValueError("constellation is empty")
    if len(stations) == 0:
        raise ValueError("at least one ground station is required")
    if not lisl_range_km > 0:
        raise ValueError(f"LISL range must be positive, got {lisl_range_km}")
    if any(not s.range_km > 0 for s in stations):
        raise ValueError("ground-station ranges must be positive")
    labels = list(sat_labels) if sat_labels is not None else [f"sat{k}" for k in range(n)]
    if len(labels) != n:
        raise ValueError("one label per satellite is required")
    gs = station_positions(stations, earth) if station_ecef is None else np.asarray(station_ecef, float)

    pairs, d = _satellite_pairs(pos, lisl_range_km, method)
    # a chord of length <= L between points at radius >= r stays above sqrt(r^2 - (L/2)^2)
    r_min = float(np.linalg.norm(pos, axis=1).min())
    graze = earth.radius_km + earth.grazing_altitude_km
    if len(pairs) and r_min**2 - (lisl_range_km / 2.0) ** 2 < graze**2:
        clear = segment_clearance(pos[pairs[:, 0]], pos[pairs[:, 1]])
        ok = clear >= graze
        pairs, d = pairs[ok], d[ok]
    rows, cols, vals = [pairs[:, 0]], [pairs[:, 1]], [d]
    for j, st in enumerate(stations):
        dist = np.linalg.norm(pos - gs[j], axis=1)
        sats = np.nonzero(dist <= st.range_km)[0]
        rows.append(np.full(len(sats), n + j))
        cols.append(sats)
        vals.append(dist[sats])
    r, c, v = (np.concatenate(x) for x in (rows, cols, vals))
    m = n + len(stations)
    lengths = coo_matrix((np.r_[v, v], (np.r_[r, c], np.r_[c, r])), shape=(m, m)).tocsr()
    return LinkGraph(labels + [s.name for s in stations], np.vstack([pos, gs]), lengths, n, earth.c_m_per_s)


@dataclass(frozen=True)
class PathResult:
    nodes: tuple[str, ...]
    node_indices: tuple[int, ...]
    total_length_km: float
    total_latency_ms: float
    lisl_count: int
    slot_index: int = 0

    @property
    def ingress(self) -> str:
        return self.nodes[1]

    @property
    def egress(self) -> str:
        return self.nodes[-2]


def _lexicographic_tight_path(lat: csr_matrix, dist: np.ndarray, src: int, dst: int) -> list[int]:
    """Lexicographically smallest node sequence among all minimum-latency src->dst paths."""
    indptr, indices, data = lat.indptr, lat.indices, lat.data
    slack = TIE_RTOL * max(dist[dst], 1e-300)

    def tight(u, v, w):
        return dist[u] + w <= dist[v] + slack

    # nodes from which dst is reachable along tight edges
    reaches = np.zeros(len(dist), dtype=bool)
    reaches[dst] = True
    stack = [dst]
    while stack:
        v = stack.pop()
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if not reaches[u] and np.isfinite(dist[u]) and tight(u, v, data[k]):
                reaches[u] = True
                stack.append(u)
    path = [src]
    while path[-1] != dst:
        u = path[-1]
        nxt = [
            indices[k]
            for k in range(indptr[u], indptr[u + 1])
            if reaches[indices[k]] and tight(u, indices[k], data[k]) and indices[k] not in path
        ]
        path.append(int(min(nxt)))
    return path


def shortest_path(graph: LinkGraph, src: str | int, dst: str | int, slot_index: int = 0) -> PathResult:
    """Minimum-latency station-to-station path (Dijkstra).

    Other stations in the graph are not used as relays.  Equal-latency
    paths are resolved to the lexicographically smallest node-index
    sequence.  Raises :class:`Unreachable` when no path exists.
    """
    s, t = graph.index(src), graph.index(dst)
    if s == t:
        raise ValueError("source and destination must be distinct stations")
    if not (graph.is_station(s) and graph.is_station(t)):
        raise ValueError("routing endpoints must be ground stations")
    lat = graph.latencies
    others = [k for k in graph.station_nodes if k not in (s, t)]
    if others:
        mask = np.ones(graph.num_nodes)
        mask[others] = 0.0
        lat = csr_matrix(lat.multiply(mask[:, None]).multiply(mask[None, :]))
        lat.eliminate_zeros()
    dist = dijkstra(lat, directed=False, indices=s)
    if not np.isfinite(dist[t]):
        raise Unreachable(f"no path between {graph.labels[s]} and {graph.labels[t]} in slot {slot_index}")
    path = _lexicographic_tight_path(lat, dist, s, t)
    length = sum(graph.edge_length(u, v) for u, v in zip(path, path[1:]))
    return PathResult(
        nodes=tuple(graph.labels[k] for k in path),
        node_indices=tuple(path),
        total_length_km=length,
        total_latency_ms=length * 1e6 / graph.c_m_per_s,
        lisl_count=len(path) - 3,
        slot_index=slot_index,
    )


def route_slot(
    sat_positions: np.ndarray,
    station_a: GroundStation,
    station_b: GroundStation,
    lisl_range_km: float,
    earth: EarthModel = EARTH,
    sat_labels: Sequence[str] | None = None,
    slot_index: int = 0,
    margin: float = 0.02,
) -> PathResult:
    """Same answer as ``shortest_path(build_graph(...))`` over the whole shell, computed on a corridor.

    Every satellite gets a lower bound on the length of any station-to-station
    path through it (best detour via an ingress-footprint satellite plus best
    detour via an egress-footprint satellite, ignoring LISL range).  Routing
    on the satellites whose bound is within a budget ``U`` is exact whenever
    the path found is no longer than ``U``; otherwise the budget grows and
    the search repeats.  ``margin`` only sets the starting budget.
    """
    return _route_corridor(sat_positions, station_a, station_b, lisl_range_km, earth, sat_labels, slot_index, margin)[0]


def _route_corridor(
    sat_positions, station_a, station_b, lisl_range_km, earth, sat_labels, slot_index, margin
) -> tuple[PathResult, float]:
    # second value: length / lower bound - 1, a good starting margin for the next slot
    pos = np.asarray(sat_positions, dtype=float)
    n = len(pos)
    labels = list(sat_labels) if sat_labels is not None else [f"sat{k}" for k in range(n)]
    gs = station_positions([station_a, station_b], earth)
    da = np.linalg.norm(pos - gs[0], axis=1)
    db = np.linalg.norm(pos - gs[1], axis=1)
    in_a = np.nonzero(da <= station_a.range_km)[0]
    in_b = np.nonzero(db <= station_b.range_km)[0]
    if len(in_a) == 0 or len(in_b) == 0:
        raise Unreachable(f"no satellite in range of an endpoint in slot {slot_index}")
    via_a = (da[in_a, None] + cdist(pos[in_a], pos)).min(axis=0)
    via_b = (db[in_b, None] + cdist(pos[in_b], pos)).min(axis=0)
    bound = via_a + via_b
    lower = float(bound.min())
    budget = lower * (1.0 + margin)
    while True:
        keep = np.nonzero(bound <= budget * (1.0 + 1e-12))[0]
        graph = build_graph(
            pos[keep],
            [station_a, station_b],
            lisl_range_km,
            earth,
            [labels[k] for k in keep],
            gs,
            method="brute",
        )
        try:
            sub = shortest_path(graph, len(keep), len(keep) + 1, slot_index)
        except Unreachable:
            if len(keep) == n:
                raise
            budget = lower + max(2.0 * (budget - lower), 1e-3 * lower)
            continue
        if sub.total_length_km * (1.0 + 1e-9) <= budget or len(keep) == n:
            full_index = [int(keep[k]) if k < len(keep) else n + (k - len(keep)) for k in sub.node_indices]
            path = PathResult(
                sub.nodes, tuple(full_index), sub.total_length_km, sub.total_latency_ms, sub.lisl_count, slot_index
            )
            return path, sub.total_length_km / lower - 1.0
        budget = sub.total_length_km * (1.0 + 1e-9)


@dataclass
class SlotSeries:
    results: list[PathResult | None]
    dt_s: float = 1.0
    unreachable: list[int] = field(default_factory=list)

    @property
    def slot_count(self) -> int:
        return len(self.results)

    @property
    def unreachable_count(self) -> int:
        return sum(r is None for r in self.results)

    @property
    def reachable(self) -> list[PathResult]:
        return [r for r in self.results if r is not None]

    @property
    def latencies_ms(self) -> np.ndarray:
        return np.array([r.total_latency_ms for r in self.reachable])

    @property
    def mean_latency_ms(self) -> float:
        lat = self.latencies_ms
        return float(lat.mean()) if len(lat) else math.nan

    @property
    def lisl_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(r.lisl_count for r in self.reachable).items()))

    def summary(self) -> dict:
        return {
            "mean_latency_ms": self.mean_latency_ms,
            "slot_count": self.slot_count,
            "unreachable_count": self.unreachable_count,
            "lisl_histogram": {str(k): v for k, v in self.lisl_histogram.items()},
        }


def _run_slots(args) -> list[PathResult | None]:
    config, station_a, station_b, lisl_range_km, earth, slots, dt_s, router = args
    elements = generate_walker(config)
    labels = elements.labels
    out = []
    margin = 0.02
    for k in slots:
        pos = propagate(elements, k * dt_s, earth)
        try:
            if router == "pruned":
                path, excess = _route_corridor(pos, station_a, station_b, lisl_range_km, earth, labels, k, margin)
                margin = excess * 1.05 + 1e-4
                out.append(path)
            else:
                g = build_graph(pos, [station_a, station_b], lisl_range_km, earth, labels)
                out.append(shortest_path(g, station_a.name, station_b.name, k))
        except Unreachable:
            out.append(None)
    return out


def simulate_connection(
    config: WalkerConfig,
    station_pair: tuple[GroundStation, GroundStation],
    lisl_range_km: float | None = None,
    duration_s: float = 3600.0,
    dt_s: float = 1.0,
    earth: EarthModel = EARTH,
    workers: int = 1,
    router: str = "pruned",
) -> SlotSeries:
    """Route one connection at every slot ``t = k * dt_s`` for ``k < duration_s / dt_s``.

    ``router="full"`` builds the whole link graph each slot; ``"pruned"``
    (default) routes on a provably sufficient corridor and gives the same
    paths.  With ``workers > 1`` slots are spread over processes and
    reassembled in slot order.
    """
    if duration_s <= 0 or dt_s <= 0:
        raise ValueError("duration and slot length must be positive")
    n_slots = duration_s / dt_s
    if abs(n_slots - round(n_slots)) > 1e-9:
        raise ValueError(f"duration {duration_s} s is not a multiple of the slot length {dt_s} s")
    if router not in ("pruned", "full"):
        raise ValueError(f"unknown router {router!r}")
    n_slots = int(round(n_slots))
    if lisl_range_km is None:
        lisl_range_km = max_lisl_range(config.altitude_km, earth)
    a, b = station_pair
    if workers > 1:
        chunks = [list(c) for c in np.array_split(np.arange(n_slots), workers * 4) if len(c)]
        jobs = [(config, a, b, lisl_range_km, earth, c, dt_s, router) for c in chunks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_slots, jobs) for r in part]
    else:
        results = _run_slots((config, a, b, lisl_range_km, earth, range(n_slots), dt_s, router))
    series = SlotSeries(results, dt_s, [k for k, r in enumerate(results) if r is None])
    if series.unreachable_count:
        log.warning(
            "%s-%s: %d of %d slots had no path and are excluded from the mean",
            a.name,
            b.name,
            series.unreachable_count,
            n_slots,
        )
    return series
