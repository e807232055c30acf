"""The ingest service: measurement ingestion, periodic per-operator
re-clustering, heatmap and nearest-stronger query endpoints."""

from __future__ import annotations

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from ..clustering import predict
from ..config import ServiceConfig
from ..geo import find_nearest_stronger, straight_line_route
from ..measurements import DedupGate, GeoPoint, MeasurementRejected, validate_measurement
from ..registry import ModelRegistry, recluster_tick
from ..scheduler import IntervalScheduler
from ..store import MeasurementStore
from .schemas import (
    AdmissionResponse,
    CandidateOut,
    MeasurementIn,
    NearestStrongResponse,
    OperatorInfo,
    OperatorsResponse,
    RejectionResponse,
    RouteOut,
)

logger = logging.getLogger(__name__)


def create_app(config: ServiceConfig) -> FastAPI:
    store = MeasurementStore(config.data_file)
    gate = DedupGate(config.dedup_window_s)
    registry = ModelRegistry()

    def tick() -> None:
        recluster_tick(store, registry, config)

    scheduler = IntervalScheduler(config.recluster_interval_s, tick)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        gate.seed_from(store.load())
        tick()  # models for any pre-existing data are ready before serving
        scheduler.start()
        yield
        scheduler.stop()
        store.close()

    app = FastAPI(title="covmap", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.config = config
    app.state.registry = registry
    app.state.store = store

    @app.post(
        "/v1/measurements",
        response_model=AdmissionResponse,
        response_model_exclude_none=True,
        responses={400: {"model": RejectionResponse}},
    )
    def post_measurement(body: MeasurementIn):
        try:
            m = validate_measurement(body.model_dump())
        except MeasurementRejected as exc:
            return JSONResponse(
                status_code=400,
                content={"status": "rejected", "reason": exc.reason, "detail": exc.detail},
            )
        if not gate.admit(m):
            return AdmissionResponse(status="suppressed", detail="inside dedup window")
        store.append(m)
        return AdmissionResponse(status="admitted")

    @app.get("/v1/heatmap")
    def get_heatmap(operator: str):
        snapshot = registry.get(operator)
        if snapshot is None:
            raise HTTPException(status_code=404, detail=f"no model for operator {operator!r}")
        return Response(content=snapshot.heatmap_geojson, media_type="application/geo+json")

    @app.get("/v1/nearest-strong", response_model=NearestStrongResponse)
    def get_nearest_strong(operator: str, lat: float, lon: float, rssi_dbm: float):
        if not -90.0 <= lat <= 90.0 or not -180.0 <= lon <= 180.0:
            raise HTTPException(status_code=400, detail=f"BadCoordinates: lat={lat}, lon={lon}")
        snapshot = registry.get(operator)
        if snapshot is None:
            raise HTTPException(status_code=404, detail=f"no model for operator {operator!r}")
        user = GeoPoint(lat, lon)
        _, user_tag = predict(snapshot.model, user, rssi_dbm)
        candidates = find_nearest_stronger(
            user,
            user_tag,
            list(snapshot.tagged_points),
            radius_m=config.search_radius_m,
            limit=config.candidate_limit,
        )
        out = []
        for c in candidates:
            route = straight_line_route(user, c.location)
            out.append(
                CandidateOut(
                    lat=c.location.lat,
                    lon=c.location.lon,
                    strength_tag=c.strength_tag,
                    distance_m=c.distance_m,
                    bearing_deg=c.bearing_deg,
                    source_measurement_count=c.source_measurement_count,
                    route=RouteOut(
                        waypoints=[[w.lat, w.lon] for w in route.waypoints],
                        total_distance_m=route.total_distance_m,
                    ),
                )
            )
        return NearestStrongResponse(operator=operator, user_tag=user_tag, candidates=out)

    @app.get("/v1/operators", response_model=OperatorsResponse)
    def get_operators():
        snapshots = registry.snapshot_map()
        return OperatorsResponse(
            operators=[
                OperatorInfo(operator=op, trained_at=snap.model.trained_at, k=snap.model.k)
                for op, snap in sorted(snapshots.items())
            ]
        )

    return app
