"""Lloyd iteration, normalization, tag assignment, model persistence.

The vectorized assignment and update steps are checked against plain
per-point loops; the full fit is checked for objective monotonicity and
against an exhaustive best-partition search on tiny instances.
"""

import itertools
import json
import math
import os

import numpy as np
import pytest

from covmap.clustering import (
    Cluster,
    ClusterModel,
    EmptyDataset,
    NormalizationParams,
    TooFewDistinctPoints,
    assign_tags,
    dispersion,
    e_step,
    fit,
    init_centroids,
    lloyd,
    load_model,
    m_step,
    model_from_json,
    model_to_json,
    normalize,
    objective,
    predict,
    save_model,
    strength_tags,
)
from covmap.measurements import GeoPoint


def random_features(n, seed):
    rng = np.random.default_rng(seed)
    return rng.random((n, 3))


def loop_e_step(features, centroids):
    out = []
    for x in features:
        best, best_d = 0, float("inf")
        for j, c in enumerate(centroids):
            d = float(np.sum((x - c) ** 2))
            if d < best_d:
                best, best_d = j, d
        out.append(best)
    return np.array(out)


def loop_objective(features, assignments, centroids):
    return float(sum(np.sum((x - centroids[a]) ** 2) for x, a in zip(features, assignments)))


# normalization


def test_normalize_maps_to_unit_cube():
    pts = [(GeoPoint(48.0 + i * 0.01, 11.0 + i * 0.02), -120 + i * 5) for i in range(10)]
    feats, params = normalize(pts)
    assert feats.shape == (10, 3)
    assert feats.min() >= 0.0 and feats.max() <= 1.0
    assert feats[0].tolist() == [0.0, 0.0, 0.0]
    assert feats[-1].tolist() == [1.0, 1.0, 1.0]


def test_normalize_degenerate_dimension_centered():
    pts = [(GeoPoint(48.0, 11.0 + i * 0.01), -80) for i in range(5)]
    feats, _ = normalize(pts)
    assert np.all(feats[:, 0] == 0.5)  # constant latitude
    assert np.all(feats[:, 2] == 0.5)  # constant rssi


def test_normalize_reuses_params_and_clamps():
    pts = [(GeoPoint(48.0 + i * 0.01, 11.0), -100 + i * 10) for i in range(5)]
    _, params = normalize(pts)
    outside = [(GeoPoint(49.0, 11.0), -20)]
    feats, _ = normalize(outside, params)
    assert feats[0, 0] == 1.0  # clamped above the training max
    assert feats[0, 2] == 1.0


def test_normalize_params_round_trip():
    pts = [(GeoPoint(48.0 + i * 0.01, 11.0 + i * 0.03), -110 + i * 7) for i in range(6)]
    _, params = normalize(pts)
    again = NormalizationParams.from_json(params.to_json())
    assert np.array_equal(again.mins, params.mins)
    assert np.array_equal(again.maxs, params.maxs)


def test_normalize_empty_raises():
    with pytest.raises(EmptyDataset):
        normalize([])


# initialization


def test_init_selects_k_distinct_existing_points():
    feats = random_features(50, 3)
    cents = init_centroids(feats, 5, seed=11)
    assert cents.shape == (5, 3)
    rows = {tuple(r) for r in cents.tolist()}
    assert len(rows) == 5
    pool = {tuple(r) for r in feats.tolist()}
    assert rows <= pool


def test_init_deterministic_under_seed():
    feats = random_features(50, 3)
    a = init_centroids(feats, 5, seed=7)
    b = init_centroids(feats, 5, seed=7)
    assert np.array_equal(a, b)


def test_init_skips_duplicate_rows():
    base = random_features(3, 0)
    feats = np.vstack([base] * 10)  # only 3 distinct rows
    cents = init_centroids(feats, 3, seed=1)
    assert len({tuple(r) for r in cents.tolist()}) == 3
    with pytest.raises(TooFewDistinctPoints):
        init_centroids(feats, 4, seed=1)


# e/m steps against loop oracles


def test_e_step_matches_loop():
    feats = random_features(200, 5)
    cents = init_centroids(feats, 4, seed=2)
    assert np.array_equal(e_step(feats, cents), loop_e_step(feats, cents))


def test_e_step_tie_prefers_lowest_cluster():
    feats = np.array([[0.5, 0.5, 0.5]])
    cents = np.array([[0.4, 0.5, 0.5], [0.6, 0.5, 0.5]])  # equidistant
    assert e_step(feats, cents)[0] == 0


def test_m_step_is_member_mean():
    feats = random_features(120, 8)
    assignments = np.random.default_rng(1).integers(0, 3, size=120)
    cents = m_step(feats, assignments, 3)
    for j in range(3):
        members = feats[assignments == j]
        assert np.allclose(cents[j], members.mean(axis=0), atol=1e-12)


def test_m_step_reseeds_empty_cluster_to_farthest_point():
    feats = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [1.0, 1.0, 1.0]])
    assignments = np.array([0, 0, 0])  # cluster 1 empty
    cents = m_step(feats, assignments, 2)
    assert np.array_equal(cents[1], feats[2])  # farthest from the mean of all three


def test_objective_matches_loop():
    feats = random_features(150, 4)
    cents = init_centroids(feats, 5, seed=3)
    assignments = e_step(feats, cents)
    assert objective(feats, assignments, cents) == pytest.approx(
        loop_objective(feats, assignments, cents), rel=1e-12
    )


def test_dispersion_is_mean_member_squared_distance():
    feats = random_features(90, 6)
    cents = init_centroids(feats, 3, seed=4)
    assignments = e_step(feats, cents)
    disp = dispersion(feats, assignments, cents, 3)
    for j in range(3):
        members = feats[assignments == j]
        want = float(np.mean(np.sum((members - cents[j]) ** 2, axis=1)))
        assert disp[j] == pytest.approx(want, rel=1e-12)


# lloyd loop


def test_lloyd_objective_never_increases():
    feats = random_features(400, 12)
    result = lloyd(feats, 5, seed=0)
    for a, b in zip(result.j_history, result.j_history[1:]):
        assert b <= a + 1e-9


def test_lloyd_converges_with_stable_assignments():
    feats = random_features(300, 13)
    result = lloyd(feats, 4, seed=1)
    assert result.converged
    # converged state is a fixed point of one more e/m round
    again = e_step(feats, result.centroids)
    assert np.array_equal(again, result.assignments)
    cents = m_step(feats, again, 4)
    assert np.allclose(cents, result.centroids, atol=1e-12)


def test_lloyd_deterministic_under_seed():
    feats = random_features(250, 14)
    a = lloyd(feats, 5, seed=9)
    b = lloyd(feats, 5, seed=9)
    assert np.array_equal(a.assignments, b.assignments)
    assert np.array_equal(a.centroids, b.centroids)
    assert a.iterations == b.iterations


def test_lloyd_finds_obvious_two_blob_split():
    rng = np.random.default_rng(21)
    blob_a = rng.normal([0.2, 0.2, 0.2], 0.02, size=(50, 3))
    blob_b = rng.normal([0.8, 0.8, 0.8], 0.02, size=(50, 3))
    feats = np.vstack([blob_a, blob_b])
    result = lloyd(feats, 2, seed=0)
    first_half = set(result.assignments[:50].tolist())
    second_half = set(result.assignments[50:].tolist())
    assert len(first_half) == 1 and len(second_half) == 1
    assert first_half != second_half


def exhaustive_best_j(feats, k):
    """Best objective over every partition into k groups (tiny n only)."""
    n = len(feats)
    best = float("inf")
    for labels in itertools.product(range(k), repeat=n):
        if len(set(labels)) != k:
            continue
        arr = np.array(labels)
        cents = np.vstack([feats[arr == j].mean(axis=0) for j in range(k)])
        best = min(best, loop_objective(feats, arr, cents))
    return best


def test_lloyd_never_beats_exhaustive_optimum():
    rng = np.random.default_rng(2)
    for trial in range(5):
        feats = rng.random((8, 3))
        want = exhaustive_best_j(feats, 2)
        got = lloyd(feats, 2, seed=trial).j_history[-1]
        assert got >= want - 1e-9


# tags


def test_strength_tags_rank_by_mean_rssi():
    assert strength_tags([-70.0, -110.0, -90.0]) == [2, 0, 1]


def test_strength_tags_tie_lower_id_lower_tag():
    assert strength_tags([-90.0, -90.0, -70.0]) == [0, 1, 2]


def test_strength_tags_always_permutation():
    rng = np.random.default_rng(17)
    for _ in range(50):
        vals = rng.uniform(-120, -60, size=5).round(1).tolist()
        tags = strength_tags(vals)
        assert sorted(tags) == [0, 1, 2, 3, 4]
        order = sorted(range(5), key=lambda i: tags[i])
        ranked = [vals[i] for i in order]
        assert ranked == sorted(ranked)


# fit / predict / persistence


def synthetic_points(n=200, seed=0):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n):
        lat = 48.10 + rng.uniform(0, 0.02)
        lon = 11.50 + rng.uniform(0, 0.02)
        rssi = int(rng.integers(-120, -60))
        pts.append((GeoPoint(lat, lon), rssi))
    return pts


def test_fit_builds_tagged_model():
    model = fit(synthetic_points(), "CarrierA", k=5, seed=3)
    assert model.k == 5
    assert len(model.clusters) == 5
    assert sorted(c.strength_tag for c in model.clusters) == [0, 1, 2, 3, 4]
    assert sum(c.member_count for c in model.clusters) == 200
    by_tag = sorted(model.clusters, key=lambda c: c.strength_tag)
    rssis = [c.mean_rssi_dbm for c in by_tag]
    assert rssis == sorted(rssis)


def test_fit_mean_rssi_is_raw_dbm():
    pts = synthetic_points(50, seed=5)
    model = fit(pts, "CarrierA", k=2, seed=0)
    assignments = model.assignments
    for cluster in model.clusters:
        members = [pts[i][1] for i in range(len(pts)) if assignments[i] == cluster.id]
        assert cluster.mean_rssi_dbm == pytest.approx(sum(members) / len(members))


def test_fit_too_few_distinct_points_raises():
    pts = [(GeoPoint(48.1, 11.5), -80)] * 10
    with pytest.raises(TooFewDistinctPoints):
        fit(pts, "CarrierA", k=5, seed=0)


def test_predict_matches_training_assignment():
    pts = synthetic_points(80, seed=9)
    model = fit(pts, "CarrierA", k=4, seed=2)
    for i, (loc, rssi) in enumerate(pts):
        cid, tag = predict(model, loc, rssi)
        assert cid == model.assignments[i]
        assert tag == model.clusters[cid].strength_tag


def test_model_json_round_trip():
    model = fit(synthetic_points(60, seed=1), "CarrierA", k=3, seed=4, trained_at=1700000000.0)
    doc = model_to_json(model)
    assert "assignments" not in doc
    again = model_from_json(doc)
    assert again.operator == model.operator
    assert again.k == model.k
    assert again.trained_at == model.trained_at
    assert np.allclose(again.centroid_matrix, model.centroid_matrix)
    for a, b in zip(again.clusters, model.clusters):
        assert (a.id, a.strength_tag, a.member_count) == (b.id, b.strength_tag, b.member_count)
        assert a.mean_rssi_dbm == pytest.approx(b.mean_rssi_dbm)
        assert a.dispersion == pytest.approx(b.dispersion)


def test_loaded_model_predicts_identically(tmp_path):
    pts = synthetic_points(100, seed=6)
    model = fit(pts, "CarrierA", k=5, seed=8)
    path = os.path.join(tmp_path, "CarrierA.json")
    save_model(model, path)
    loaded = load_model(path)
    for loc, rssi in pts[:25]:
        assert predict(loaded, loc, rssi) == predict(model, loc, rssi)


def test_save_model_atomic_file_valid_json(tmp_path):
    model = fit(synthetic_points(40, seed=2), "CarrierA", k=2, seed=0)
    path = os.path.join(tmp_path, "m.json")
    save_model(model, path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    assert doc["operator"] == "CarrierA"
    assert len(os.listdir(tmp_path)) == 1  # no stray temp files left behind
