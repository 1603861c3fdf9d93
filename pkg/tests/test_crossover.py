import math

import numpy as np
import pytest
from scipy.optimize import brentq

from skyfiber.crossover import (
    REFERENCE_ALTITUDES_KM,
    REFERENCE_INDICES,
    CrossoverQuery,
    NoCrossover,
    PerSlotCrossoverQuery,
    Scenario,
    average_crossover,
    bisect_decreasing,
    crossover_function,
    emit_crossover_tables,
    function_sweep,
    owsn_distance,
    per_slot_crossover_function,
    solve_crossover,
    solve_per_slot_crossover,
)
from skyfiber.geo import EarthModel, slant_range

# Roots of the closed-form ratio found with scipy's brentq (xtol 1e-14) on an
# independently written expression: (h, i, scenario, theta_deg, d_km).
FROZEN_ROOTS = [
    (550.0, 1.5, 1, 23.45332877, 2610.7565),
    (1100.0, 1.1, 1, 127.52171169, 14195.3471),
    (300.0, 1.4675, 1, 12.75368375, 1419.7031),
    (550.0, 1.1, 2, 142.02496104, 15809.8067),
    (550.0, 1.1, 3, 44.74031690, 4980.3623),
    (550.0, 1.1, 4, 112.35839041, 12507.4101),
    (900.0, 1.3, 3, 16.81672552, 1871.9891),
    (300.0, 1.2, 2, 87.93020241, 9788.1351),
]


def _query(h, i, s, eps=25.0):
    return CrossoverQuery(h, i, eps, Scenario(s))


@pytest.mark.parametrize("h, i, s, theta, d", FROZEN_ROOTS)
def test_frozen_roots(h, i, s, theta, d):
    r = solve_crossover(_query(h, i, s))
    assert r.found
    assert r.theta_crossover_deg == pytest.approx(theta, abs=1e-7)
    assert r.distance_crossover_km == pytest.approx(d, abs=1e-3)


@pytest.mark.parametrize("s", list(Scenario))
@pytest.mark.parametrize("h", REFERENCE_ALTITUDES_KM)
def test_bisection_agrees_with_brentq(h, s):
    for i in REFERENCE_INDICES:
        q = _query(h, i, s)
        expect = brentq(lambda t: float(crossover_function(t, q)) - 1.0, 1e-6, 360.0, xtol=1e-13)
        assert solve_crossover(q).theta_crossover_deg == pytest.approx(expect, abs=1e-8)


def test_scenario_distances_by_hand():
    q2 = _query(550.0, 1.1, 2)
    r, off = q2.gs_range_km, q2.offset_km
    chord = 2 * (6378.0 + 550.0) * math.sin(math.radians(10.0))
    assert owsn_distance(20.0, q2) == pytest.approx(2 * r + chord + 2 * off)
    assert owsn_distance(20.0, _query(550.0, 1.1, 3)) == pytest.approx(2 * r + chord - 2 * off)
    assert owsn_distance(20.0, _query(550.0, 1.1, 4)) == pytest.approx(2 * r + chord)
    assert owsn_distance(20.0, _query(550.0, 1.1, 1)) == pytest.approx(2 * 550.0 + chord)


def test_scenario1_forces_zenith_geometry():
    q = CrossoverQuery(550.0, 1.5, 25.0, Scenario.S1)
    assert q.elevation_deg == 90.0
    assert q.gs_range_km == 550.0
    assert q.offset_km == pytest.approx(0.0, abs=1e-9)


def test_function_is_decreasing_and_crosses_once():
    q = _query(550.0, 1.5, 2)
    thetas = np.arange(0.1, 360.0, 0.1)
    f = crossover_function(thetas, q)
    assert np.all(np.diff(f) < 0)
    assert np.sum(np.diff(np.sign(f - 1.0)) != 0) == 1


def test_parameter_monotonicity():
    for s in Scenario:
        by_i = [solve_crossover(_query(550.0, i, s)).distance_crossover_km for i in REFERENCE_INDICES]
        assert all(a < b for a, b in zip(by_i, by_i[1:]))  # indices are listed high to low
        by_h = [solve_crossover(_query(h, 1.3, s)).distance_crossover_km for h in REFERENCE_ALTITUDES_KM]
        assert all(a < b for a, b in zip(by_h, by_h[1:]))


def test_average_row_and_table_emission():
    row = average_crossover(550.0, 1.1)
    assert row.complete
    assert row.gs_range_km == pytest.approx(slant_range(25.0, 550.0))
    assert row.average_d_crossover_km == pytest.approx(
        np.mean([r.distance_crossover_km for r in row.results.values()])
    )
    assert round(row.average_d_crossover_km) == 10733
    rows = emit_crossover_tables([300.0, 550.0], [1.5, 1.1])
    assert [(r.altitude_km, r.refractive_index) for r in rows] == [(300.0, 1.5), (300.0, 1.1), (550.0, 1.5), (550.0, 1.1)]
    with pytest.raises(ValueError):
        emit_crossover_tables([], [1.5])


def test_no_crossover_is_reported_not_raised():
    # from geostationary height the access legs alone outweigh any fibre arc
    r = solve_crossover(CrossoverQuery(35786.0, 1.0, 25.0, Scenario.S2))
    assert isinstance(r, NoCrossover) and not r.found
    assert r.ratio_hi > 1.0
    assert r.distance_crossover_km is None
    row = average_crossover(35786.0, 1.0)
    assert not row.complete and row.average_d_crossover_km is None


@pytest.mark.parametrize(
    "kwargs",
    [dict(altitude_km=0.0, refractive_index=1.5), dict(altitude_km=550.0, refractive_index=0.9),
     dict(altitude_km=550.0, refractive_index=1.5, elevation_deg=91.0, scenario=Scenario.S2)],
)
def test_query_validation(kwargs):
    with pytest.raises(ValueError):
        CrossoverQuery(**kwargs)


def test_function_rejects_zero_angle():
    with pytest.raises(ValueError):
        crossover_function(0.0, _query(550.0, 1.5, 1))


def test_bisect_decreasing_on_known_root():
    root = bisect_decreasing(lambda x: 2.0 - x, 0.0, 10.0, 1e-12)
    assert root == pytest.approx(2.0, abs=1e-12)


def test_earth_model_is_threaded_through():
    small = EarthModel(radius_km=6000.0)
    a = solve_crossover(CrossoverQuery(550.0, 1.5, 90.0, Scenario.S1))
    b = solve_crossover(CrossoverQuery(550.0, 1.5, 90.0, Scenario.S1, small))
    assert a.theta_crossover_deg != pytest.approx(b.theta_crossover_deg)


def test_function_sweep_pairs():
    pts = function_sweep(_query(550.0, 1.5, 1), [10.0, 20.0])
    assert [t for t, _ in pts] == [10.0, 20.0]
    assert pts[0][1] > pts[1][1]


# -- per-slot variant -----------------------------------------------------------


def test_per_slot_symmetric_matches_scenario2():
    base = _query(700.0, 1.3, 2)
    q = PerSlotCrossoverQuery(base, 25.0, 25.0)
    thetas = np.linspace(1.0, 170.0, 50)
    np.testing.assert_allclose(per_slot_crossover_function(thetas, q), crossover_function(thetas, base), rtol=1e-12)
    assert solve_per_slot_crossover(q).theta_crossover_deg == pytest.approx(
        solve_crossover(base).theta_crossover_deg, abs=1e-8
    )


def test_per_slot_rss_option_differs_from_sum():
    base = _query(550.0, 1.3, 2)
    s = PerSlotCrossoverQuery(base, 25.0, 40.0, offset_combination="sum")
    r = PerSlotCrossoverQuery(base, 25.0, 40.0, offset_combination="rss")
    assert r.owsn_distance(30.0) < s.owsn_distance(30.0)


def test_per_slot_asymmetric_lies_between_symmetric_cases():
    base = _query(550.0, 1.3, 2)
    lo = solve_per_slot_crossover(PerSlotCrossoverQuery(base, 60.0, 60.0)).theta_crossover_deg
    mid = solve_per_slot_crossover(PerSlotCrossoverQuery(base, 25.0, 60.0)).theta_crossover_deg
    hi = solve_per_slot_crossover(PerSlotCrossoverQuery(base, 25.0, 25.0)).theta_crossover_deg
    assert lo < mid < hi


def test_per_slot_zigzag_lowers_root():
    base = _query(550.0, 1.3, 2)
    r0 = solve_per_slot_crossover(PerSlotCrossoverQuery(base, 30.0, 50.0, 0.0))
    r1 = solve_per_slot_crossover(PerSlotCrossoverQuery(base, 30.0, 50.0, 0.1))
    assert r1.theta_crossover_deg < r0.theta_crossover_deg


@pytest.mark.parametrize("kwargs", [dict(ingress_elevation_deg=-1.0), dict(zigzag_delta=-0.1), dict(offset_combination="max")])
def test_per_slot_validation(kwargs):
    args = dict(base=_query(550.0, 1.3, 2), ingress_elevation_deg=25.0, egress_elevation_deg=25.0)
    args.update(kwargs)
    with pytest.raises(ValueError):
        PerSlotCrossoverQuery(**args)
