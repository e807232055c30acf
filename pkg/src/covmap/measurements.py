"""Measurement records: validation and the per-device admission window.

A measurement is one timestamped, geotagged RSSI sample from one device on
one operator. Validation is pure; admission state (the dedup window) lives
in DedupGate, which serializes decisions per (device_id, operator) key.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Any, Mapping, Optional

RSSI_MIN_DBM = -140
RSSI_MAX_DBM = -20
DEFAULT_DEDUP_WINDOW_S = 10.0
DEFAULT_MAX_FUTURE_SKEW_S = 300.0


class MeasurementRejected(Exception):
    """A candidate measurement violated an invariant; `reason` names it."""

    reason = "MeasurementRejected"

    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__(f"{self.reason}: {detail}" if detail else self.reason)


class MalformedMeasurement(MeasurementRejected):
    reason = "MalformedMeasurement"


class BadCoordinates(MeasurementRejected):
    reason = "BadCoordinates"


class OutOfRangeRssi(MeasurementRejected):
    reason = "OutOfRangeRssi"


class MissingOperator(MeasurementRejected):
    reason = "MissingOperator"


class ClockSkew(MeasurementRejected):
    reason = "ClockSkew"


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float


@dataclass(frozen=True)
class CellInfo:
    """LTE cell identity block; every field optional as a group."""

    mci: Optional[int] = None           # 28-bit cell identity
    mpci: Optional[int] = None
    mtac: Optional[int] = None          # 16-bit tracking area code
    mrfnc: Optional[int] = None         # 18-bit absolute RF channel number
    bandwidth_khz: Optional[int] = None
    mcc: Optional[int] = None
    mnc: Optional[int] = None
    alpha_long: Optional[str] = None
    alpha_short: Optional[str] = None
    registered: Optional[bool] = None
    timestamp_ns: Optional[int] = None
    connection_status: Optional[str] = None


@dataclass(frozen=True)
class SignalExtras:
    """Additional LTE signal quality fields; unused by clustering."""

    rsrp: Optional[float] = None
    rsrq: Optional[float] = None
    rssnr: Optional[float] = None
    cqi: Optional[int] = None
    ta: Optional[int] = None
    level: Optional[int] = None         # 0..4 when present


@dataclass(frozen=True)
class Measurement:
    device_id: str
    timestamp_s: float
    location: GeoPoint
    rssi_dbm: int
    operator: str
    cell_info: Optional[CellInfo] = None
    extras: Optional[SignalExtras] = None


_CELL_INFO_INT_FIELDS = ("mci", "mpci", "mtac", "mrfnc", "bandwidth_khz", "mcc", "mnc", "timestamp_ns")
_CELL_INFO_STR_FIELDS = ("alpha_long", "alpha_short", "connection_status")
_CELL_INFO_BIT_LIMITS = {"mci": 1 << 28, "mtac": 1 << 16, "mrfnc": 1 << 18}
_EXTRAS_NUM_FIELDS = ("rsrp", "rsrq", "rssnr")
_EXTRAS_INT_FIELDS = ("cqi", "ta", "level")


def _require_number(raw: Mapping[str, Any], key: str) -> float:
    value = raw.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedMeasurement(f"field '{key}' must be a number")
    return float(value)


def _parse_cell_info(raw: Any) -> CellInfo:
    if not isinstance(raw, Mapping):
        raise MalformedMeasurement("cell_info must be an object")
    kwargs: dict[str, Any] = {}
    for key in _CELL_INFO_INT_FIELDS:
        value = raw.get(key)
        if value is None:
            continue
        if isinstance(value, bool) or not isinstance(value, int):
            raise MalformedMeasurement(f"cell_info.{key} must be an integer")
        limit = _CELL_INFO_BIT_LIMITS.get(key)
        if limit is not None and not 0 <= value < limit:
            raise MalformedMeasurement(f"cell_info.{key}={value} exceeds {limit.bit_length() - 1} bits")
        kwargs[key] = value
    for key in _CELL_INFO_STR_FIELDS:
        value = raw.get(key)
        if value is None:
            continue
        if not isinstance(value, str):
            raise MalformedMeasurement(f"cell_info.{key} must be a string")
        kwargs[key] = value
    if raw.get("registered") is not None:
        if not isinstance(raw["registered"], bool):
            raise MalformedMeasurement("cell_info.registered must be a boolean")
        kwargs["registered"] = raw["registered"]
    return CellInfo(**kwargs)


def _parse_extras(raw: Any) -> SignalExtras:
    if not isinstance(raw, Mapping):
        raise MalformedMeasurement("extras must be an object")
    kwargs: dict[str, Any] = {}
    for key in _EXTRAS_NUM_FIELDS:
        value = raw.get(key)
        if value is None:
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MalformedMeasurement(f"extras.{key} must be a number")
        kwargs[key] = float(value)
    for key in _EXTRAS_INT_FIELDS:
        value = raw.get(key)
        if value is None:
            continue
        if isinstance(value, bool) or not isinstance(value, int):
            raise MalformedMeasurement(f"extras.{key} must be an integer")
        kwargs[key] = value
    if kwargs.get("level") is not None and not 0 <= kwargs["level"] <= 4:
        raise MalformedMeasurement(f"extras.level={kwargs['level']} outside 0..4")
    return SignalExtras(**kwargs)


def validate_measurement(
    raw: Mapping[str, Any],
    *,
    now_s: Optional[float] = None,
    max_future_skew_s: float = DEFAULT_MAX_FUTURE_SKEW_S,
) -> Measurement:
    """Validate a structurally parsed record into a Measurement.

    Raises a MeasurementRejected subclass naming the first violated
    invariant. Field names follow the wire format: device_id, timestamp_s,
    lat, lon, rssi_dbm, operator, cell_info?, extras?.
    """
    if not isinstance(raw, Mapping):
        raise MalformedMeasurement("measurement must be a JSON object")

    device_id = raw.get("device_id")
    if not isinstance(device_id, str) or not device_id:
        raise MalformedMeasurement("field 'device_id' must be a non-empty string")

    timestamp_s = _require_number(raw, "timestamp_s")
    lat = _require_number(raw, "lat")
    lon = _require_number(raw, "lon")

    rssi_raw = raw.get("rssi_dbm")
    if isinstance(rssi_raw, bool) or not isinstance(rssi_raw, (int, float)):
        raise MalformedMeasurement("field 'rssi_dbm' must be a number")
    if isinstance(rssi_raw, float) and not rssi_raw.is_integer():
        raise MalformedMeasurement("field 'rssi_dbm' must be an integer")
    rssi_dbm = int(rssi_raw)

    operator = raw.get("operator")
    if not isinstance(operator, str) or not operator:
        raise MissingOperator("field 'operator' must be a non-empty string")

    cell_info = _parse_cell_info(raw["cell_info"]) if raw.get("cell_info") is not None else None
    extras = _parse_extras(raw["extras"]) if raw.get("extras") is not None else None

    if not -90.0 <= lat <= 90.0 or not -180.0 <= lon <= 180.0:
        raise BadCoordinates(f"lat={lat}, lon={lon}")
    if not RSSI_MIN_DBM <= rssi_dbm <= RSSI_MAX_DBM:
        raise OutOfRangeRssi(f"rssi_dbm={rssi_dbm} outside [{RSSI_MIN_DBM}, {RSSI_MAX_DBM}]")
    if timestamp_s < 0:
        raise ClockSkew(f"timestamp_s={timestamp_s} is negative")
    now = time.time() if now_s is None else now_s
    if timestamp_s > now + max_future_skew_s:
        raise ClockSkew(f"timestamp_s={timestamp_s} more than {max_future_skew_s}s in the future")

    return Measurement(
        device_id=device_id,
        timestamp_s=timestamp_s,
        location=GeoPoint(lat, lon),
        rssi_dbm=rssi_dbm,
        operator=operator,
        cell_info=cell_info,
        extras=extras,
    )


def _prune_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def measurement_to_wire(m: Measurement) -> dict:
    """Flat wire/storage representation (one JSON object per stored line)."""
    doc: dict[str, Any] = {
        "device_id": m.device_id,
        "timestamp_s": m.timestamp_s,
        "lat": m.location.lat,
        "lon": m.location.lon,
        "rssi_dbm": m.rssi_dbm,
        "operator": m.operator,
    }
    if m.cell_info is not None:
        doc["cell_info"] = _prune_none(vars(m.cell_info).copy())
    if m.extras is not None:
        doc["extras"] = _prune_none(vars(m.extras).copy())
    return doc


def dedup_admit(
    m: Measurement,
    last_admitted: Optional[float],
    window_s: float = DEFAULT_DEDUP_WINDOW_S,
) -> bool:
    """Pure admission decision: admit the first sample for a key, then only
    samples at least window_s after the previously admitted one."""
    return last_admitted is None or m.timestamp_s - last_admitted >= window_s


class DedupGate:
    """Admission state for the dedup window, keyed by (device_id, operator).

    Decisions for the same key are serialized under one lock; admitted
    measurements update the stored admission timestamp.
    """

    def __init__(self, window_s: float = DEFAULT_DEDUP_WINDOW_S):
        self.window_s = window_s
        self._last: dict[tuple[str, str], float] = {}
        self._lock = threading.Lock()

    def admit(self, m: Measurement) -> bool:
        key = (m.device_id, m.operator)
        with self._lock:
            if dedup_admit(m, self._last.get(key), self.window_s):
                self._last[key] = m.timestamp_s
                return True
            return False

    def seed_from(self, measurements: list[Measurement]) -> None:
        """Rebuild admission state from previously stored measurements."""
        with self._lock:
            for m in measurements:
                key = (m.device_id, m.operator)
                prev = self._last.get(key)
                if prev is None or m.timestamp_s > prev:
                    self._last[key] = m.timestamp_s
