"""Great-circle geometry: distances, bearings, the nearest-stronger-signal
search, and straight-line route polylines.

All functions are pure. Distances use a spherical earth of radius
6,371,000 m; ellipsoidal error is irrelevant at the 100 m search scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .measurements import GeoPoint

EARTH_RADIUS_M = 6_371_000.0
DEFAULT_SEARCH_RADIUS_M = 100.0
DEFAULT_CANDIDATE_LIMIT = 3
ROUTE_SPACING_M = 10.0


class DegenerateSegment(Exception):
    """Bearing is undefined between two identical points."""


@dataclass(frozen=True)
class TaggedPoint:
    """A stored, model-tagged measurement location: the candidate universe
    for the nearest-stronger search."""

    location: GeoPoint
    strength_tag: int
    source_measurement_count: int = 1


@dataclass(frozen=True)
class CandidateLocation:
    location: GeoPoint
    strength_tag: int
    distance_m: float
    bearing_deg: float
    source_measurement_count: int


@dataclass(frozen=True)
class RoutePolyline:
    waypoints: tuple[GeoPoint, ...]
    total_distance_m: float


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters."""
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def initial_bearing(a: GeoPoint, b: GeoPoint) -> float:
    """Forward azimuth from a to b, degrees in [0, 360)."""
    if a.lat == b.lat and a.lon == b.lon:
        raise DegenerateSegment("bearing undefined for identical points")
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlon = math.radians(b.lon - a.lon)
    x = math.sin(dlon) * math.cos(lat2)
    y = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    return (math.degrees(math.atan2(x, y)) + 360.0) % 360.0


def find_nearest_stronger(
    user: GeoPoint,
    user_tag: int,
    tagged_points: list[TaggedPoint],
    radius_m: float = DEFAULT_SEARCH_RADIUS_M,
    limit: int = DEFAULT_CANDIDATE_LIMIT,
) -> list[CandidateLocation]:
    """Up to `limit` points with tag > user_tag within radius_m of the user,
    ascending by distance; ties by descending tag, then lat, then lon.

    An empty list is a valid answer (the user may already be in the
    strongest nearby zone).
    """
    qualifying = []
    for tp in tagged_points:
        if tp.strength_tag <= user_tag:
            continue
        d = haversine_distance(user, tp.location)
        if d <= radius_m:
            qualifying.append((d, -tp.strength_tag, tp.location.lat, tp.location.lon, tp))
    qualifying.sort(key=lambda entry: entry[:4])
    out = []
    for d, _, _, _, tp in qualifying[:limit]:
        bearing = 0.0 if d == 0.0 else initial_bearing(user, tp.location)
        out.append(
            CandidateLocation(
                location=tp.location,
                strength_tag=tp.strength_tag,
                distance_m=d,
                bearing_deg=bearing,
                source_measurement_count=tp.source_measurement_count,
            )
        )
    return out


def _to_unit_vector(p: GeoPoint) -> tuple[float, float, float]:
    lat = math.radians(p.lat)
    lon = math.radians(p.lon)
    return (math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat))


def _from_unit_vector(v: tuple[float, float, float]) -> GeoPoint:
    x, y, z = v
    return GeoPoint(math.degrees(math.atan2(z, math.hypot(x, y))), math.degrees(math.atan2(y, x)))


def straight_line_route(user: GeoPoint, target: GeoPoint, spacing_m: float = ROUTE_SPACING_M) -> RoutePolyline:
    """Great-circle polyline from user to target with waypoints at most
    spacing_m apart; endpoints are exact."""
    total = haversine_distance(user, target)
    if total == 0.0:
        return RoutePolyline(waypoints=(user,), total_distance_m=0.0)

    segments = max(1, math.ceil(total / spacing_m))
    a = _to_unit_vector(user)
    b = _to_unit_vector(target)
    delta = total / EARTH_RADIUS_M  # central angle
    sin_delta = math.sin(delta)

    waypoints = [user]
    for i in range(1, segments):
        f = i / segments
        # spherical interpolation along the great circle
        wa = math.sin((1.0 - f) * delta) / sin_delta
        wb = math.sin(f * delta) / sin_delta
        waypoints.append(_from_unit_vector((wa * a[0] + wb * b[0], wa * a[1] + wb * b[1], wa * a[2] + wb * b[2])))
    waypoints.append(target)
    return RoutePolyline(waypoints=tuple(waypoints), total_distance_m=total)
