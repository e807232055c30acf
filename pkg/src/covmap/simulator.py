"""Synthetic handset traffic in place of real devices.

A log-distance path-loss field over virtual towers gives every location an
RSSI per operator (strongest serving tower wins); seeded random-walk UEs
sample it on a fixed cadence and hand each measurement to a sink (HTTP
poster or file writer). Ground-truth strongest-tower labels back the
clustering-quality checks.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geo import EARTH_RADIUS_M, haversine_distance
from .measurements import GeoPoint, Measurement, measurement_to_wire

_METERS_PER_DEGREE = EARTH_RADIUS_M * math.pi / 180.0
MAX_STEP_M = 15.0
RSSI_CLAMP = (-140.0, -20.0)


class NoTowerForOperator(Exception):
    pass


class SinkFailure(Exception):
    def __init__(self, message: str, partial_summary: Optional["TraceSummary"] = None):
        super().__init__(message)
        self.partial_summary = partial_summary


@dataclass(frozen=True)
class Tower:
    location: GeoPoint
    tx_power_dbm: float
    operator: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.tx_power_dbm <= 60.0:
            raise ValueError(f"tx_power_dbm={self.tx_power_dbm} outside [0, 60]")


@dataclass(frozen=True)
class Scenario:
    towers: tuple[Tower, ...]
    ue_count: int
    south_west: GeoPoint
    north_east: GeoPoint
    duration_s: float
    cadence_s: float = 10.0
    path_loss_exponent: float = 3.0
    reference_loss_db: float = 40.0  # at d0 = 1 m
    shadowing_sigma_db: float = 4.0
    rng_seed: int = 0
    start_timestamp_s: Optional[float] = None  # None: wall clock at run start

    def __post_init__(self) -> None:
        if self.ue_count < 1:
            raise ValueError("ue_count must be >= 1")
        if self.cadence_s < 1:
            raise ValueError("cadence_s must be >= 1")
        if not 1.6 <= self.path_loss_exponent <= 6.5:
            raise ValueError("path_loss_exponent outside [1.6, 6.5]")
        if self.south_west.lat >= self.north_east.lat or self.south_west.lon >= self.north_east.lon:
            raise ValueError("bounding box is degenerate")
        if not self.towers:
            raise ValueError("scenario needs at least one tower")

    @property
    def operators(self) -> list[str]:
        return sorted({t.operator for t in self.towers})


def scenario_from_json(doc: dict) -> Scenario:
    towers = tuple(
        Tower(
            location=GeoPoint(float(t["lat"]), float(t["lon"])),
            tx_power_dbm=float(t["tx_power_dbm"]),
            operator=str(t["operator"]),
        )
        for t in doc["towers"]
    )
    bbox = doc["bbox"]  # [min_lat, min_lon, max_lat, max_lon]
    kwargs = {}
    for key in (
        "cadence_s",
        "path_loss_exponent",
        "reference_loss_db",
        "shadowing_sigma_db",
        "rng_seed",
        "start_timestamp_s",
    ):
        if key in doc:
            kwargs[key] = doc[key]
    return Scenario(
        towers=towers,
        ue_count=int(doc["ue_count"]),
        south_west=GeoPoint(float(bbox[0]), float(bbox[1])),
        north_east=GeoPoint(float(bbox[2]), float(bbox[3])),
        duration_s=float(doc["duration_s"]),
        **kwargs,
    )


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_json(json.load(fh))


def _tower_rssi(scenario: Scenario, tower: Tower, location: GeoPoint) -> float:
    d = max(haversine_distance(location, tower.location), 1.0)
    path_loss = scenario.reference_loss_db + 10.0 * scenario.path_loss_exponent * math.log10(d)
    return tower.tx_power_dbm - path_loss


def field_rssi(
    scenario: Scenario,
    operator: str,
    location: GeoPoint,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Received signal at a location: strongest serving tower of the
    operator under log-distance path loss, with an optional per-tower
    shadowing draw, clamped to the physically plausible range."""
    towers = [t for t in scenario.towers if t.operator == operator]
    if not towers:
        raise NoTowerForOperator(operator)
    best = -math.inf
    for tower in towers:
        received = _tower_rssi(scenario, tower, location)
        if rng is not None and scenario.shadowing_sigma_db > 0:
            received += rng.normal(0.0, scenario.shadowing_sigma_db)
        best = max(best, received)
    return min(max(best, RSSI_CLAMP[0]), RSSI_CLAMP[1])


def oracle_labels(scenario: Scenario, points: list[GeoPoint], operator: Optional[str] = None) -> list[int]:
    """Ground-truth label per point: index (into scenario.towers) of the
    strongest-signal tower, shadowing disabled; ties take the lowest index."""
    tower_ids = [
        i for i, t in enumerate(scenario.towers) if operator is None or t.operator == operator
    ]
    if not tower_ids:
        raise NoTowerForOperator(operator or "<any>")
    labels = []
    for p in points:
        best_id = tower_ids[0]
        best_rssi = -math.inf
        for tid in tower_ids:
            received = _tower_rssi(scenario, scenario.towers[tid], p)
            if received > best_rssi:
                best_rssi = received
                best_id = tid
        labels.append(best_id)
    return labels


@dataclass
class TraceSummary:
    per_operator: dict[str, int] = field(default_factory=dict)
    total: int = 0

    def record(self, operator: str) -> None:
        self.per_operator[operator] = self.per_operator.get(operator, 0) + 1
        self.total += 1


def _reflect(value: float, lo: float, hi: float) -> float:
    if value < lo:
        value = 2.0 * lo - value
    elif value > hi:
        value = 2.0 * hi - value
    return min(max(value, lo), hi)


def run_scenario(scenario: Scenario, sink: Callable[[Measurement], None], seed: Optional[int] = None) -> TraceSummary:
    """Walk every UE through the field, emitting one measurement per
    cadence tick (t = 0 .. duration inclusive) into the sink.

    Each UE keeps a stable synthetic device id and a fixed operator
    (round-robin over the scenario's operators). Steps are at most 15 m
    per tick and reflect off the bounding box edges.
    """
    seed = scenario.rng_seed if seed is None else seed
    base_t = time.time() if scenario.start_timestamp_s is None else scenario.start_timestamp_s
    operators = scenario.operators
    ticks = int(scenario.duration_s // scenario.cadence_s) + 1
    summary = TraceSummary()

    for ue in range(scenario.ue_count):
        rng = np.random.default_rng([seed, ue])
        operator = operators[ue % len(operators)]
        device_id = f"sim-ue-{ue:04d}"
        lat = rng.uniform(scenario.south_west.lat, scenario.north_east.lat)
        lon = rng.uniform(scenario.south_west.lon, scenario.north_east.lon)
        for tick in range(ticks):
            location = GeoPoint(lat, lon)
            rssi = field_rssi(scenario, operator, location, rng if scenario.shadowing_sigma_db > 0 else None)
            m = Measurement(
                device_id=device_id,
                timestamp_s=base_t + tick * scenario.cadence_s,
                location=location,
                rssi_dbm=int(round(rssi)),
                operator=operator,
            )
            try:
                sink(m)
            except Exception as exc:
                raise SinkFailure(f"sink failed after {summary.total} measurements: {exc}", summary) from exc
            summary.record(operator)

            heading = rng.uniform(0.0, 2.0 * math.pi)
            step_m = rng.uniform(0.0, MAX_STEP_M)
            dlat = step_m * math.cos(heading) / _METERS_PER_DEGREE
            dlon = step_m * math.sin(heading) / (_METERS_PER_DEGREE * math.cos(math.radians(lat)))
            lat = _reflect(lat + dlat, scenario.south_west.lat, scenario.north_east.lat)
            lon = _reflect(lon + dlon, scenario.south_west.lon, scenario.north_east.lon)
    return summary


class FileSink:
    """Writes measurements as JSON lines."""

    def __init__(self, path: str):
        self._fh = open(path, "w", encoding="utf-8")

    def __call__(self, m: Measurement) -> None:
        self._fh.write(json.dumps(measurement_to_wire(m), separators=(",", ":")) + "\n")

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "FileSink":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class HttpSink:
    """Posts measurements to a running ingest service."""

    def __init__(self, base_url: str, session=None):
        import requests

        self.url = base_url.rstrip("/") + "/v1/measurements"
        self._session = session or requests.Session()

    def __call__(self, m: Measurement) -> None:
        resp = self._session.post(self.url, json=measurement_to_wire(m), timeout=10)
        if resp.status_code != 200:
            raise RuntimeError(f"POST {self.url} -> {resp.status_code}: {resp.text[:200]}")

    def close(self) -> None:
        self._session.close()

    def __enter__(self) -> "HttpSink":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
