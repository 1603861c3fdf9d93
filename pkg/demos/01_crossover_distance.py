"""Where does a laser-linked satellite path start beating fibre?

Walks through the crossover function for one altitude/index pair, then
builds the full altitude x index grid for all four ground-station
geometries.  Run:  python demos/01_crossover_distance.py
"""
import numpy as np

from skyfiber import CrossoverQuery, Scenario, average_crossover, solve_crossover
from skyfiber.crossover import REFERENCE_ALTITUDES_KM, REFERENCE_INDICES, crossover_function
from skyfiber.geo import max_lisl_range, slant_range

# --- one pair: h = 550 km shell against fibre with index 1.5 -----------------
q = CrossoverQuery(altitude_km=550.0, refractive_index=1.5, scenario=Scenario.S1)

# the ratio (satellite path / fibre path latency) falls with separation
for theta in (5.0, 15.0, 23.0, 24.0, 40.0, 90.0):
    print(f"theta={theta:5.1f} deg  ratio={float(crossover_function(theta, q)):.4f}")

r = solve_crossover(q)
print(f"\ncrossover at {r.theta_crossover_deg:.4f} deg = {r.distance_crossover_km:.0f} km along the surface")

# --- the four geometries -------------------------------------------------------
# S1: satellites straight overhead; S2-S4: stations at the 25 deg elevation mask
# with the satellite displaced away from / towards the other end, or not at all.
for s in Scenario:
    res = solve_crossover(CrossoverQuery(550.0, 1.1, 25.0, s))
    print(f"{s.name}: {res.distance_crossover_km:8.0f} km")

# --- full grid: the four-scenario average -------------------------------------
print("\naverage crossover distance (km); rows = altitude, columns = refractive index")
print("h \\ i  " + "".join(f"{i:>8}" for i in REFERENCE_INDICES))
grid = np.array([[average_crossover(h, i).average_d_crossover_km for i in REFERENCE_INDICES] for h in REFERENCE_ALTITUDES_KM])
for h, row in zip(REFERENCE_ALTITUDES_KM, grid):
    print(f"{h:6.0f} " + "".join(f"{v:8.0f}" for v in row))

# a higher shell or a lower-index fibre pushes the crossover further out
assert np.all(np.diff(grid, axis=0) > 0)   # grows with altitude
assert np.all(np.diff(grid, axis=1) > 0)   # grows as the index drops

# --- derived link constants ----------------------------------------------------
for h in (300.0, 550.0, 1100.0):
    print(f"h={h:6.0f} km: station reach {slant_range(25.0, h):6.0f} km, max laser link {max_lisl_range(h):6.0f} km")
