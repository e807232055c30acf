"""K-means engine for per-operator signal clustering.

Points are (lat, lon, rssi_dbm) triples, min-max normalized per dimension
into [0,1]^3 so squared distances are meaningful across degrees and dBm.
Lloyd iteration alternates assignment (E-step) and centroid recomputation
(M-step) until the assignment vector stops changing. Cluster strength tags
rank clusters by mean raw RSSI: 0 = weakest, K-1 = strongest.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .measurements import GeoPoint

DEFAULT_K = 5
DEFAULT_MAX_ITER = 300


class EmptyDataset(Exception):
    pass


class TooFewDistinctPoints(Exception):
    pass


@dataclass(frozen=True)
class NormalizationParams:
    """Per-dimension min/max in raw units, dimension order (lat, lon, rssi)."""

    mins: np.ndarray
    maxs: np.ndarray

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Scale raw points into [0,1]^3, clamping out-of-range values.
        A degenerate dimension (max == min) maps to 0.5 everywhere."""
        span = self.maxs - self.mins
        safe = np.where(span > 0, span, 1.0)
        features = (np.asarray(points, dtype=float) - self.mins) / safe
        features = np.where(span > 0, features, 0.5)
        return np.clip(features, 0.0, 1.0)

    def to_json(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "NormalizationParams":
        return cls(mins=np.asarray(doc["mins"], dtype=float), maxs=np.asarray(doc["maxs"], dtype=float))


def _as_rows(points: Sequence[tuple[GeoPoint, float]]) -> np.ndarray:
    """Raw (lat, lon, rssi) rows from (GeoPoint, rssi_dbm) pairs."""
    if len(points) == 0:
        raise EmptyDataset("need at least one (GeoPoint, rssi_dbm) pair")
    return np.array([[p.lat, p.lon, float(r)] for p, r in points], dtype=float)


def normalize(
    points: Sequence[tuple[GeoPoint, float]],
    params: Optional[NormalizationParams] = None,
) -> tuple[np.ndarray, NormalizationParams]:
    """Min-max scale (GeoPoint, rssi_dbm) pairs into [0,1]^3 feature rows.

    With explicit params (predict-time reuse) out-of-range values clamp to
    the unit cube; otherwise params are fitted from the data.
    """
    rows = _as_rows(points)
    if params is None:
        params = NormalizationParams(mins=rows.min(axis=0), maxs=rows.max(axis=0))
    return params.apply(rows), params


def init_centroids(features: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Shuffle the dataset and take the first k distinct vectors."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    order = rng.permutation(features.shape[0])
    chosen: list[np.ndarray] = []
    for idx in order:
        candidate = features[idx]
        if any(np.array_equal(candidate, c) for c in chosen):
            continue
        chosen.append(candidate)
        if len(chosen) == k:
            return np.array(chosen)
    raise TooFewDistinctPoints(f"need {k} distinct points, found {len(chosen)}")


def e_step(features: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Assign each point to the centroid with minimal squared distance;
    ties go to the lowest cluster index."""
    d2 = ((features[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def m_step(features: np.ndarray, assignments: np.ndarray, k: int) -> np.ndarray:
    """Recompute each centroid as the mean of its members. An empty cluster
    is reseeded to the point farthest from its assigned centroid."""
    dim = features.shape[1]
    sums = np.zeros((k, dim))
    np.add.at(sums, assignments, features)
    counts = np.bincount(assignments, minlength=k).astype(float)
    nonempty = counts > 0
    centroids = np.zeros((k, dim))
    centroids[nonempty] = sums[nonempty] / counts[nonempty, None]

    empty_ids = np.flatnonzero(~nonempty)
    if empty_ids.size:
        dists = ((features - centroids[assignments]) ** 2).sum(axis=1)
        for cid in empty_ids:
            idx = int(np.argmax(dists))  # ties: lowest point index
            centroids[cid] = features[idx]
            dists[idx] = -1.0  # a point seeds at most one cluster
    return centroids


def objective(features: np.ndarray, assignments: np.ndarray, centroids: np.ndarray) -> float:
    """Total within-cluster sum of squared distances."""
    return float(((features - centroids[assignments]) ** 2).sum())


def dispersion(features: np.ndarray, assignments: np.ndarray, centroids: np.ndarray, k: int) -> np.ndarray:
    """Per-cluster mean squared member-to-centroid distance (0 for empty)."""
    d2 = ((features - centroids[assignments]) ** 2).sum(axis=1)
    totals = np.zeros(k)
    np.add.at(totals, assignments, d2)
    counts = np.bincount(assignments, minlength=k).astype(float)
    return np.divide(totals, counts, out=np.zeros(k), where=counts > 0)


@dataclass
class LloydResult:
    centroids: np.ndarray
    assignments: np.ndarray
    iterations: int
    converged: bool
    j_history: list[float]  # objective after every E-step and M-step, in order


def lloyd(features: np.ndarray, k: int, seed: int, max_iter: int = DEFAULT_MAX_ITER) -> LloydResult:
    """Run Lloyd iteration until assignments repeat between consecutive
    iterations, or max_iter is reached."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    centroids = init_centroids(features, k, seed)
    assignments: Optional[np.ndarray] = None
    j_history: list[float] = []
    iterations = 0
    converged = False
    for it in range(1, max_iter + 1):
        new_assignments = e_step(features, centroids)
        j_history.append(objective(features, new_assignments, centroids))
        iterations = it
        if assignments is not None and np.array_equal(new_assignments, assignments):
            converged = True
            break
        assignments = new_assignments
        centroids = m_step(features, assignments, k)
        j_history.append(objective(features, assignments, centroids))

    # Repair path for a max_iter cutoff that left a cluster empty; a
    # naturally converged run cannot (the reseeded point always moves).
    for _ in range(k):
        if np.bincount(assignments, minlength=k).min() > 0:
            break
        centroids = m_step(features, assignments, k)
        assignments = e_step(features, centroids)

    return LloydResult(
        centroids=centroids,
        assignments=assignments,
        iterations=iterations,
        converged=converged,
        j_history=j_history,
    )


@dataclass(frozen=True)
class Cluster:
    id: int
    centroid: np.ndarray  # normalized feature space
    member_count: int
    mean_rssi_dbm: float
    dispersion: float
    strength_tag: int


@dataclass
class ClusterModel:
    operator: str
    k: int
    clusters: list[Cluster]
    assignments: Optional[np.ndarray]  # None for models loaded from disk
    objective_j: float
    iterations: int
    norm: NormalizationParams
    trained_at: float
    rng_seed: int

    @property
    def centroid_matrix(self) -> np.ndarray:
        return np.array([c.centroid for c in self.clusters])

    @property
    def tags(self) -> list[int]:
        return [c.strength_tag for c in self.clusters]


def strength_tags(mean_rssis: Sequence[float]) -> list[int]:
    """Rank clusters by ascending mean RSSI: 0 = weakest, K-1 = strongest.
    Ties break toward the lower cluster id getting the lower tag."""
    order = sorted(range(len(mean_rssis)), key=lambda i: (mean_rssis[i], i))
    tags = [0] * len(mean_rssis)
    for rank, cluster_id in enumerate(order):
        tags[cluster_id] = rank
    return tags


def assign_tags(model: ClusterModel) -> ClusterModel:
    """Return the model with strength tags recomputed from mean RSSI."""
    tags = strength_tags([c.mean_rssi_dbm for c in model.clusters])
    clusters = [
        Cluster(
            id=c.id,
            centroid=c.centroid,
            member_count=c.member_count,
            mean_rssi_dbm=c.mean_rssi_dbm,
            dispersion=c.dispersion,
            strength_tag=tags[c.id],
        )
        for c in model.clusters
    ]
    model.clusters = clusters
    return model


def fit(
    points: Sequence[tuple[GeoPoint, float]],
    operator: str,
    k: int = DEFAULT_K,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    trained_at: Optional[float] = None,
) -> ClusterModel:
    """Fit a fresh per-operator model on (GeoPoint, rssi_dbm) pairs.

    Normalization parameters are fitted on this dataset and stored in the
    model for predict-time reuse. Mean RSSI per cluster is computed on the
    raw dBm column so tags reflect physical strength ordering.
    """
    rows = _as_rows(points)
    features, params = normalize(points)
    result = lloyd(features, k, seed, max_iter)

    rssi = rows[:, 2]
    d2 = ((features - result.centroids[result.assignments]) ** 2).sum(axis=1)
    clusters = []
    for cid in range(k):
        members = result.assignments == cid
        count = int(members.sum())
        clusters.append(
            Cluster(
                id=cid,
                centroid=result.centroids[cid],
                member_count=count,
                mean_rssi_dbm=float(rssi[members].mean()) if count else float("nan"),
                dispersion=float(d2[members].mean()) if count else 0.0,
                strength_tag=0,
            )
        )
    model = ClusterModel(
        operator=operator,
        k=k,
        clusters=clusters,
        assignments=result.assignments,
        objective_j=objective(features, result.assignments, result.centroids),
        iterations=result.iterations,
        norm=params,
        trained_at=time.time() if trained_at is None else trained_at,
        rng_seed=seed,
    )
    return assign_tags(model)


def predict(model: ClusterModel, location: GeoPoint, rssi_dbm: float) -> tuple[int, int]:
    """Assign one probe to its nearest cluster. Returns (cluster_id, tag);
    out-of-range probes clamp onto the training cube."""
    feature = model.norm.apply(np.array([[location.lat, location.lon, rssi_dbm]]))
    cluster_id = int(e_step(feature, model.centroid_matrix)[0])
    return cluster_id, model.clusters[cluster_id].strength_tag


def model_to_json(model: ClusterModel) -> dict:
    return {
        "operator": model.operator,
        "k": model.k,
        "objective_j": model.objective_j,
        "iterations": model.iterations,
        "trained_at": model.trained_at,
        "rng_seed": model.rng_seed,
        "norm": model.norm.to_json(),
        "clusters": [
            {
                "id": c.id,
                "centroid": c.centroid.tolist(),
                "member_count": c.member_count,
                "mean_rssi_dbm": c.mean_rssi_dbm,
                "dispersion": c.dispersion,
                "strength_tag": c.strength_tag,
            }
            for c in model.clusters
        ],
    }


def model_from_json(doc: dict) -> ClusterModel:
    clusters = [
        Cluster(
            id=int(c["id"]),
            centroid=np.asarray(c["centroid"], dtype=float),
            member_count=int(c["member_count"]),
            mean_rssi_dbm=float(c["mean_rssi_dbm"]),
            dispersion=float(c["dispersion"]),
            strength_tag=int(c["strength_tag"]),
        )
        for c in doc["clusters"]
    ]
    return ClusterModel(
        operator=doc["operator"],
        k=int(doc["k"]),
        clusters=clusters,
        assignments=None,
        objective_j=float(doc["objective_j"]),
        iterations=int(doc["iterations"]),
        norm=NormalizationParams.from_json(doc["norm"]),
        trained_at=float(doc["trained_at"]),
        rng_seed=int(doc["rng_seed"]),
    )


def save_model(model: ClusterModel, path: str) -> None:
    """Write the model JSON atomically (temp file then rename)."""
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(model_to_json(model), fh)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def load_model(path: str) -> ClusterModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
