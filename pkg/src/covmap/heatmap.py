"""Strength-tagged heatmap documents and their GeoJSON export.

Tagged measurement points aggregate onto a ~10 m grid: a cell displays the
highest tag observed in it (optimistic display, matching what navigation
would steer a user toward), the mean RSSI over its members, and how many
samples it holds.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Optional

from .geo import EARTH_RADIUS_M
from .measurements import GeoPoint

GRID_CELL_M = 10.0
_METERS_PER_DEGREE = EARTH_RADIUS_M * math.pi / 180.0

# red -> green, weakest tag to strongest
TAG_COLORS = {0: "#d73027", 1: "#fc8d59", 2: "#fee08b", 3: "#91cf60", 4: "#1a9850"}


def tag_color(tag: int) -> str:
    """Ramp lookup; tags beyond the 5-step ramp clamp to its ends."""
    return TAG_COLORS[min(max(tag, 0), 4)]


def grid_cell(point: GeoPoint, cell_m: float = GRID_CELL_M) -> tuple[int, int]:
    """Fixed-degree grid index. Cell edges are cell_m at the equator and
    shrink with cos(lat) in longitude, so a cell never exceeds cell_m."""
    cell_deg = cell_m / _METERS_PER_DEGREE
    return (math.floor(point.lat / cell_deg), math.floor(point.lon / cell_deg))


@dataclass(frozen=True)
class HeatmapPoint:
    location: GeoPoint
    strength_tag: int
    mean_rssi_dbm: float
    sample_count: int


@dataclass(frozen=True)
class HeatmapDocument:
    operator: str
    generated_at: float
    points: tuple[HeatmapPoint, ...]


def build_heatmap(
    tagged_points: list[tuple[GeoPoint, int, float]],
    operator: str,
    generated_at: Optional[float] = None,
    cell_m: float = GRID_CELL_M,
) -> HeatmapDocument:
    """Aggregate (location, tag, rssi_dbm) triples into one point per grid
    cell: highest tag wins the cell (its location represents it), RSSI is
    averaged over all members. Output ordering is lat-major, then lon."""
    cells: dict[tuple[int, int], list] = {}
    for location, tag, rssi in tagged_points:
        key = grid_cell(location, cell_m)
        entry = cells.get(key)
        if entry is None:
            cells[key] = [location, tag, rssi, 1]
        else:
            if tag > entry[1]:
                entry[0] = location
                entry[1] = tag
            entry[2] += rssi
            entry[3] += 1

    points = [
        HeatmapPoint(
            location=loc,
            strength_tag=tag,
            mean_rssi_dbm=rssi_sum / count,
            sample_count=count,
        )
        for loc, tag, rssi_sum, count in cells.values()
    ]
    points.sort(key=lambda p: (p.location.lat, p.location.lon))
    return HeatmapDocument(
        operator=operator,
        generated_at=time.time() if generated_at is None else generated_at,
        points=tuple(points),
    )


def to_geojson(doc: HeatmapDocument, trained_at: Optional[float] = None) -> str:
    """Serialize to a GeoJSON FeatureCollection of Point features.

    Coordinates are (lon, lat) per GeoJSON convention. operator,
    generated_at, and trained_at ride along as foreign members so a client
    can tell which model snapshot produced the tags. Output is
    byte-identical for identical inputs.
    """
    collection: dict = {"type": "FeatureCollection"}
    if doc.points:
        # foreign members (RFC 7946 allowed) identify the producing snapshot
        collection["operator"] = doc.operator
        collection["generated_at"] = doc.generated_at
        if trained_at is not None:
            collection["trained_at"] = trained_at
    collection["features"] = [
        {
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [p.location.lon, p.location.lat]},
            "properties": {
                "strength_tag": p.strength_tag,
                "mean_rssi_dbm": p.mean_rssi_dbm,
                "sample_count": p.sample_count,
                "color": tag_color(p.strength_tag),
            },
        }
        for p in doc.points
    ]
    return json.dumps(collection, separators=(",", ":"))
