"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict


class MeasurementIn(BaseModel):
    """Raw measurement body. Fields are deliberately untyped here: domain
    validation (with its named rejection reasons and 400 responses) happens
    in covmap.measurements, not in pydantic."""

    model_config = ConfigDict(extra="allow")

    device_id: Any = None
    timestamp_s: Any = None
    lat: Any = None
    lon: Any = None
    rssi_dbm: Any = None
    operator: Any = None
    cell_info: Any = None
    extras: Any = None


class AdmissionResponse(BaseModel):
    status: Literal["admitted", "suppressed"]
    detail: Optional[str] = None


class RejectionResponse(BaseModel):
    status: Literal["rejected"]
    reason: str
    detail: str


class RouteOut(BaseModel):
    waypoints: list[list[float]]  # [[lat, lon], ...]
    total_distance_m: float


class CandidateOut(BaseModel):
    lat: float
    lon: float
    strength_tag: int
    distance_m: float
    bearing_deg: float
    source_measurement_count: int
    route: RouteOut


class NearestStrongResponse(BaseModel):
    operator: str
    user_tag: int
    candidates: list[CandidateOut]


class OperatorInfo(BaseModel):
    operator: str
    trained_at: float
    k: int


class OperatorsResponse(BaseModel):
    operators: list[OperatorInfo]
