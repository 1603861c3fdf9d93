"""CSV sweeps for plotting the crossover curves with any tool.

Writes three files in the current directory:
  ratio_vs_theta.csv     ratio against separation angle, all four geometries
  distance_vs_index.csv  crossover distance against refractive index
  distance_vs_altitude.csv
and shows the per-slot variant with unequal elevations and a fibre detour.
"""
import csv

import numpy as np

from skyfiber import CrossoverQuery, PerSlotCrossoverQuery, Scenario, solve_crossover, solve_per_slot_crossover
from skyfiber.crossover import function_sweep


def write(name, header, rows):
    with open(name, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {name} ({len(rows)} rows)")


thetas = np.arange(0.5, 180.01, 0.5)
rows = []
for s in Scenario:
    q = CrossoverQuery(550.0, 1.5, 25.0, s)
    rows += [(s.value, round(t, 2), round(f, 6)) for t, f in function_sweep(q, thetas)]
write("ratio_vs_theta.csv", ["scenario", "theta_deg", "ratio"], rows)

indices = np.round(np.arange(1.10, 1.501, 0.01), 2)
write(
    "distance_vs_index.csv",
    ["h_km", "i", "d_km"],
    [(h, i, round(solve_crossover(CrossoverQuery(h, i, scenario=Scenario.S1)).distance_crossover_km))
     for h in (300.0, 550.0, 1100.0) for i in indices],
)

altitudes = np.arange(300.0, 1101.0, 50.0)
write(
    "distance_vs_altitude.csv",
    ["i", "h_km", "d_km"],
    [(i, h, round(solve_crossover(CrossoverQuery(h, i, scenario=Scenario.S1)).distance_crossover_km))
     for i in (1.1, 1.3, 1.4675) for h in altitudes],
)

# per-slot variant: the two stations see their satellites at different elevations
base = CrossoverQuery(550.0, 1.3, 25.0, Scenario.S2)
for e_in, e_out, detour in [(25, 25, 0.0), (25, 60, 0.0), (60, 60, 0.0), (25, 25, 0.1)]:
    r = solve_per_slot_crossover(PerSlotCrossoverQuery(base, e_in, e_out, detour))
    print(f"elevations {e_in:2d}/{e_out:2d} deg, fibre detour {detour:.0%}: crossover {r.distance_crossover_km:6.0f} km")
