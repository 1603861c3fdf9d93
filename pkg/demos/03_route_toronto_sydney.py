"""Route Toronto -> Sydney over a 1,100 km Walker shell for a few minutes.

Shows the slot-by-slot path, the laser-link count, and how the mean compares
with fibre at three refractive indices.  A full hour (3,600 slots) takes a
few minutes on one core; here we run 120 one-second slots.
"""
from skyfiber import GroundStation, OftnConfig, OwsnConfig, WalkerConfig, load_catalog, oftn_latency
from skyfiber.linkgraph import simulate_connection

cities = load_catalog()
net = OwsnConfig("OWSN3", altitude_km=1100.0).resolved()
print(f"{net.name}: laser range {net.lisl_range_km:.0f} km, station reach {net.gs_range_km:.0f} km")

toronto = GroundStation("toronto", cities["toronto"], net.gs_range_km)
sydney = GroundStation("sydney", cities["sydney"], net.gs_range_km)
shell = WalkerConfig(num_planes=24, sats_per_plane=66, inclination_deg=53.0, altitude_km=net.altitude_km)

series = simulate_connection(shell, (toronto, sydney), net.lisl_range_km, duration_s=120.0, dt_s=1.0)

first = series.results[0]
print("first path:", " -> ".join(first.nodes))
print(f"  {first.total_length_km:.0f} km, {first.total_latency_ms:.2f} ms, {first.lisl_count} laser links")

changes = sum(a.nodes != b.nodes for a, b in zip(series.results, series.results[1:]))
print(f"path changed {changes} times in {series.slot_count} slots; link-count histogram {series.lisl_histogram}")
print(f"mean latency {series.mean_latency_ms:.2f} ms")

distance = cities.distance_km("toronto", "sydney")
for i in (1.1, 1.3, 1.4675):
    t = oftn_latency(distance, OftnConfig(f"i={i}", i))
    verdict = "satellite wins" if series.mean_latency_ms < t else "fibre wins"
    print(f"fibre at i={i}: {t:6.2f} ms  -> {verdict}")
