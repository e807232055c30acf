"""Per-operator model registry and the periodic retrain logic.

Each retrain fits a fresh model on all stored measurements for an operator,
tags every stored point, persists the model file, and atomically swaps an
immutable snapshot (model + candidate index + rendered heatmap) into the
registry. Readers always see a complete snapshot; one operator's failure
never blocks another's update.
"""

from __future__ import annotations

import logging
import os
import threading
import time
import zlib
from dataclasses import dataclass
from typing import Optional
from urllib.parse import quote

import numpy as np

from . import clustering
from .clustering import ClusterModel, TooFewDistinctPoints
from .config import ServiceConfig
from .geo import TaggedPoint
from .heatmap import build_heatmap, to_geojson
from .measurements import Measurement
from .store import MeasurementStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OperatorSnapshot:
    model: ClusterModel
    tagged_points: tuple[TaggedPoint, ...]  # 10 m-deduped candidate universe
    heatmap_geojson: str


class ModelRegistry:
    """Single-writer / many-reader map of operator -> snapshot."""

    def __init__(self):
        self._snapshots: dict[str, OperatorSnapshot] = {}
        self._lock = threading.Lock()

    def get(self, operator: str) -> Optional[OperatorSnapshot]:
        with self._lock:
            return self._snapshots.get(operator)

    def swap(self, operator: str, snapshot: OperatorSnapshot) -> None:
        with self._lock:
            self._snapshots[operator] = snapshot

    def snapshot_map(self) -> dict[str, OperatorSnapshot]:
        with self._lock:
            return dict(self._snapshots)


def operator_seed(base_seed: int, operator: str) -> int:
    """Deterministic, per-operator distinct RNG seed."""
    return (base_seed ^ zlib.crc32(operator.encode("utf-8"))) & 0x7FFFFFFF


def model_path(model_dir: str, operator: str) -> str:
    # operator names are client-supplied; percent-encode for the filesystem
    return os.path.join(model_dir, quote(operator, safe="") + ".json")


def tag_measurements(model: ClusterModel, measurements: list[Measurement]) -> list[tuple]:
    """Predict a strength tag for every stored measurement; identical to
    per-point clustering.predict, batched."""
    points = np.array([[m.location.lat, m.location.lon, m.rssi_dbm] for m in measurements], dtype=float)
    features = model.norm.apply(points)
    assignments = clustering.e_step(features, model.centroid_matrix)
    tags = model.tags
    return [
        (m.location, tags[int(cid)], float(m.rssi_dbm))
        for m, cid in zip(measurements, assignments)
    ]


def recluster_tick(store: MeasurementStore, registry: ModelRegistry, config: ServiceConfig) -> list[str]:
    """Refit every operator with enough data and swap in fresh snapshots.

    Returns the operators whose models were updated. Operators with fewer
    than k distinct feature vectors retain their previous model.
    """
    measurements = store.load()
    by_operator: dict[str, list[Measurement]] = {}
    for m in measurements:
        by_operator.setdefault(m.operator, []).append(m)

    updated: list[str] = []
    for operator in sorted(by_operator):
        ms = by_operator[operator]
        try:
            model = clustering.fit(
                [(m.location, m.rssi_dbm) for m in ms],
                operator,
                k=config.k,
                seed=operator_seed(config.rng_seed, operator),
                trained_at=time.time(),
            )
        except TooFewDistinctPoints:
            logger.info("operator %s: fewer than k=%d distinct points, keeping previous model", operator, config.k)
            continue
        except Exception:
            logger.exception("operator %s: retrain failed, keeping previous model", operator)
            continue

        try:
            tagged = tag_measurements(model, ms)
            doc = build_heatmap(tagged, operator, generated_at=model.trained_at)
            geojson = to_geojson(doc, trained_at=model.trained_at)
            index = tuple(
                TaggedPoint(p.location, p.strength_tag, p.sample_count) for p in doc.points
            )
            # persist before swapping so every served snapshot has its file
            clustering.save_model(model, model_path(config.model_dir, operator))
            registry.swap(operator, OperatorSnapshot(model, index, geojson))
            updated.append(operator)
        except Exception:
            logger.exception("operator %s: snapshot build failed, keeping previous model", operator)
            continue
    return updated
