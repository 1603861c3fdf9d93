import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skyfiber.geo import (
    EARTH,
    EarthModel,
    GeodeticPoint,
    arc_length,
    central_angle,
    chord_length,
    cosine_offset,
    geodetic_to_ecef,
    max_lisl_range,
    segment_clearance,
    slant_range,
)

lats = st.floats(-90, 90, allow_nan=False)
lons = st.floats(-180, 180, allow_nan=False)
points = st.builds(GeodeticPoint, lats, lons)
altitudes = st.floats(150, 2000)
elevations = st.floats(0, 90)


def _angle_via_ecef(a, b):
    u = np.array(geodetic_to_ecef(a)) / EARTH.radius_km
    v = np.array(geodetic_to_ecef(b)) / EARTH.radius_km
    # atan2 form stays accurate near 0 and 180 degrees
    return math.degrees(math.atan2(np.linalg.norm(np.cross(u, v)), np.dot(u, v)))


@settings(max_examples=300, deadline=None)
@given(points, points)
def test_central_angle_matches_ecef_vector_angle(a, b):
    assert central_angle(a, b) == pytest.approx(_angle_via_ecef(a, b), abs=1e-6)


@given(points, points)
def test_central_angle_symmetric_and_bounded(a, b):
    th = central_angle(a, b)
    assert 0.0 <= th <= 180.0
    assert th == pytest.approx(central_angle(b, a), abs=1e-12)


def test_arc_length_reference_values():
    assert arc_length(360.0) == pytest.approx(2 * math.pi * 6378.0)
    assert arc_length(23.4533) == pytest.approx(2610.8, abs=0.1)
    np.testing.assert_allclose(arc_length(np.array([0.0, 90.0])), [0.0, math.pi * 6378.0 / 2])


@given(st.floats(0, 180), altitudes)
def test_chord_equals_distance_between_points_on_shell(theta, h):
    r = EARTH.radius_km + h
    a = np.array([r, 0.0, 0.0])
    b = r * np.array([math.cos(math.radians(theta)), math.sin(math.radians(theta)), 0.0])
    assert chord_length(theta, h) == pytest.approx(np.linalg.norm(a - b), rel=1e-12, abs=1e-9)


@settings(max_examples=200)
@given(elevations, altitudes)
def test_slant_range_satisfies_law_of_cosines(eps, h):
    # triangle centre-station-satellite: angle at the station is 90 + eps
    R, r = EARTH.radius_km, slant_range(eps, h)
    lhs = (R + h) ** 2
    rhs = R**2 + r**2 + 2 * R * r * math.sin(math.radians(eps))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_slant_range_limits():
    assert slant_range(90.0, 550.0) == 550.0
    assert slant_range(25.0, 550.0) == pytest.approx(1123.0, abs=1.0)
    # range grows as the elevation mask drops
    assert slant_range(10.0, 550.0) > slant_range(25.0, 550.0) > slant_range(60.0, 550.0)
    with pytest.raises(ValueError):
        slant_range(95.0, 550.0)
    with pytest.raises(ValueError):
        slant_range(-1.0, 550.0)


def test_cosine_offset_is_law_of_cosines_and_non_negative():
    h, r = 550.0, slant_range(25.0, 550.0)
    alpha = 65.0
    assert cosine_offset(h, r, alpha) == pytest.approx(
        math.sqrt(h * h + r * r - 2 * h * r * math.cos(math.radians(alpha)))
    )
    assert cosine_offset(550.0, 550.0, 0.0) == 0.0


@pytest.mark.parametrize("h, expected", [(300.0, 3400.0), (550.0, 5016.0), (1100.0, 7540.0)])
def test_max_lisl_range_reference_values(h, expected):
    assert max_lisl_range(h) == pytest.approx(expected, abs=1.0)


@given(st.floats(100, 3000))
def test_max_lisl_segment_just_grazes(h):
    # two satellites exactly max range apart: the segment's closest approach is the grazing radius
    d = max_lisl_range(h)
    r = EARTH.radius_km + h
    half = math.asin(d / 2 / r)
    a = np.array([[r * math.cos(half), r * math.sin(half), 0.0]])
    b = np.array([[r * math.cos(half), -r * math.sin(half), 0.0]])
    assert segment_clearance(a, b)[0] == pytest.approx(EARTH.radius_km + EARTH.grazing_altitude_km, rel=1e-9)


def test_max_lisl_range_rejects_orbits_below_grazing_height():
    with pytest.raises(ValueError):
        max_lisl_range(80.0)


def test_segment_clearance_endpoint_and_interior_cases():
    a = np.array([[7000.0, 0.0, 0.0], [7000.0, 0.0, 0.0]])
    b = np.array([[8000.0, 0.0, 0.0], [-7000.0, 1.0, 0.0]])
    c = segment_clearance(a, b)
    assert c[0] == pytest.approx(7000.0)  # closest point is an endpoint
    assert c[1] < 1.0  # passes (almost) through the centre


def test_geodetic_point_validation_and_ecef():
    with pytest.raises(ValueError):
        GeodeticPoint(91.0, 0.0)
    with pytest.raises(ValueError):
        GeodeticPoint(0.0, 181.0)
    p = geodetic_to_ecef(GeodeticPoint(0.0, 90.0))
    assert p.norm() == pytest.approx(EARTH.radius_km)
    assert p.y == pytest.approx(EARTH.radius_km)


def test_earth_model_validation_and_latency():
    with pytest.raises(ValueError):
        EarthModel(radius_km=-1.0)
    assert EARTH.latency_ms(299792.458) == pytest.approx(1000.0)
