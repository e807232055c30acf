"""Great-circle distance, bearings, candidate search, route polylines.

Distance checks use the spherical law of cosines as an independently
coded oracle; candidate search is checked against a brute-force scan.
"""

import math
import random

import pytest

from covmap.geo import (
    EARTH_RADIUS_M,
    DegenerateSegment,
    TaggedPoint,
    find_nearest_stronger,
    haversine_distance,
    initial_bearing,
    straight_line_route,
)
from covmap.measurements import GeoPoint


def law_of_cosines_distance(a, b):
    p1, p2 = math.radians(a.lat), math.radians(b.lat)
    dl = math.radians(b.lon - a.lon)
    inner = math.sin(p1) * math.sin(p2) + math.cos(p1) * math.cos(p2) * math.cos(dl)
    return EARTH_RADIUS_M * math.acos(min(1.0, max(-1.0, inner)))


def test_distance_zero_for_identical_points():
    p = GeoPoint(48.137, 11.575)
    assert haversine_distance(p, p) == 0.0


def test_distance_symmetry():
    a, b = GeoPoint(48.1, 11.5), GeoPoint(48.2, 11.6)
    assert haversine_distance(a, b) == haversine_distance(b, a)


def test_quarter_meridian_distance():
    # pole to equator along a meridian is a quarter of the great circle
    d = haversine_distance(GeoPoint(0.0, 0.0), GeoPoint(90.0, 0.0))
    assert d == pytest.approx(EARTH_RADIUS_M * math.pi / 2, rel=1e-12)


def test_one_degree_of_longitude_at_equator():
    d = haversine_distance(GeoPoint(0.0, 0.0), GeoPoint(0.0, 1.0))
    assert d == pytest.approx(EARTH_RADIUS_M * math.pi / 180.0, rel=1e-12)


def test_distance_agrees_with_law_of_cosines():
    rnd = random.Random(42)
    for _ in range(300):
        a = GeoPoint(rnd.uniform(-80, 80), rnd.uniform(-179, 179))
        b = GeoPoint(a.lat + rnd.uniform(-0.01, 0.01), a.lon + rnd.uniform(-0.01, 0.01))
        assert haversine_distance(a, b) == pytest.approx(law_of_cosines_distance(a, b), abs=0.01)


def test_bearing_cardinal_directions():
    origin = GeoPoint(0.0, 0.0)
    assert initial_bearing(origin, GeoPoint(1.0, 0.0)) == pytest.approx(0.0)
    assert initial_bearing(origin, GeoPoint(0.0, 1.0)) == pytest.approx(90.0)
    assert initial_bearing(origin, GeoPoint(-1.0, 0.0)) == pytest.approx(180.0)
    assert initial_bearing(origin, GeoPoint(0.0, -1.0)) == pytest.approx(270.0)


def test_bearing_range_half_open():
    rnd = random.Random(7)
    for _ in range(100):
        a = GeoPoint(rnd.uniform(-80, 80), rnd.uniform(-179, 179))
        b = GeoPoint(a.lat + rnd.uniform(-0.5, 0.5), a.lon + rnd.uniform(-0.5, 0.5))
        if (a.lat, a.lon) == (b.lat, b.lon):
            continue
        assert 0.0 <= initial_bearing(a, b) < 360.0


def test_bearing_identical_points_degenerate():
    p = GeoPoint(10.0, 20.0)
    with pytest.raises(DegenerateSegment):
        initial_bearing(p, p)


# candidate search


def grid_points(user, tags):
    """Lay tagged points east of the user at 20 m intervals."""
    deg_per_m = 1.0 / (EARTH_RADIUS_M * math.pi / 180.0)
    pts = []
    for i, tag in enumerate(tags):
        loc = GeoPoint(user.lat, user.lon + (i + 1) * 20.0 * deg_per_m / math.cos(math.radians(user.lat)))
        pts.append(TaggedPoint(location=loc, strength_tag=tag))
    return pts


def brute_force_candidates(user, user_tag, points, radius_m, limit):
    found = []
    for p in points:
        d = haversine_distance(user, p.location)
        if p.strength_tag > user_tag and d <= radius_m:
            found.append((d, -p.strength_tag, p.location.lat, p.location.lon, p))
    found.sort(key=lambda t: t[:4])
    return [t[4] for t in found[:limit]]


def test_no_stronger_points_means_empty():
    user = GeoPoint(48.1, 11.5)
    pts = grid_points(user, [0, 1, 2])
    assert find_nearest_stronger(user, 2, pts) == []


def test_search_respects_radius():
    user = GeoPoint(48.1, 11.5)
    pts = grid_points(user, [3] * 10)  # 20 m .. 200 m east
    got = find_nearest_stronger(user, 0, pts, radius_m=100.0, limit=10)
    assert len(got) == 5  # 20, 40, 60, 80, 100 m qualify
    assert all(c.distance_m <= 100.0 + 1e-9 for c in got)


def test_search_sorted_by_distance_and_limited():
    user = GeoPoint(48.1, 11.5)
    pts = grid_points(user, [4, 3, 4, 2])
    got = find_nearest_stronger(user, 1, pts, radius_m=100.0, limit=3)
    assert len(got) == 3
    dists = [c.distance_m for c in got]
    assert dists == sorted(dists)
    assert got[0].strength_tag == 4


def test_search_matches_brute_force_scan():
    rnd = random.Random(99)
    user = GeoPoint(48.1, 11.5)
    for trial in range(50):
        pts = []
        for _ in range(40):
            loc = GeoPoint(user.lat + rnd.uniform(-0.002, 0.002), user.lon + rnd.uniform(-0.002, 0.002))
            pts.append(TaggedPoint(location=loc, strength_tag=rnd.randint(0, 4)))
        user_tag = rnd.randint(0, 4)
        got = find_nearest_stronger(user, user_tag, pts, radius_m=100.0, limit=3)
        want = brute_force_candidates(user, user_tag, pts, 100.0, 3)
        assert [(c.location, c.strength_tag) for c in got] == [
            (p.location, p.strength_tag) for p in want
        ]


def test_candidate_carries_distance_and_bearing():
    user = GeoPoint(0.0, 0.0)
    east = GeoPoint(0.0, 0.0005)
    got = find_nearest_stronger(user, 0, [TaggedPoint(location=east, strength_tag=4)])
    assert len(got) == 1
    assert got[0].bearing_deg == pytest.approx(90.0)
    assert got[0].distance_m == pytest.approx(haversine_distance(user, east))


def test_candidate_at_user_position_gets_zero_bearing():
    user = GeoPoint(48.1, 11.5)
    got = find_nearest_stronger(user, 0, [TaggedPoint(location=user, strength_tag=4)])
    assert got[0].distance_m == 0.0
    assert got[0].bearing_deg == 0.0


# route polylines


def test_route_endpoints_exact():
    a, b = GeoPoint(48.1, 11.5), GeoPoint(48.1008, 11.5008)
    route = straight_line_route(a, b)
    assert route.waypoints[0] == a
    assert route.waypoints[-1] == b


def test_route_zero_length():
    p = GeoPoint(48.1, 11.5)
    route = straight_line_route(p, p)
    assert route.waypoints == (p,)
    assert route.total_distance_m == 0.0


def test_route_spacing_bound():
    rnd = random.Random(5)
    for _ in range(30):
        a = GeoPoint(rnd.uniform(-60, 60), rnd.uniform(-170, 170))
        b = GeoPoint(a.lat + rnd.uniform(-0.005, 0.005), a.lon + rnd.uniform(-0.005, 0.005))
        route = straight_line_route(a, b)
        for u, v in zip(route.waypoints, route.waypoints[1:]):
            assert haversine_distance(u, v) <= 10.0 + 1e-6


def test_route_segments_sum_to_total():
    a, b = GeoPoint(48.1, 11.5), GeoPoint(48.1015, 11.5011)
    route = straight_line_route(a, b)
    total = sum(haversine_distance(u, v) for u, v in zip(route.waypoints, route.waypoints[1:]))
    assert total == pytest.approx(route.total_distance_m, rel=1e-3)
    assert route.total_distance_m == pytest.approx(haversine_distance(a, b), rel=1e-9)


def test_route_waypoints_on_great_circle():
    # every interior waypoint splits user->target into consistent partial arcs
    a, b = GeoPoint(10.0, 20.0), GeoPoint(10.004, 20.003)
    route = straight_line_route(a, b)
    for w in route.waypoints:
        d = haversine_distance(a, w) + haversine_distance(w, b)
        assert d == pytest.approx(route.total_distance_m, rel=1e-9)
