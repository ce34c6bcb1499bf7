import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import geodiv

FIXTURES = Path(os.environ.get("GEODIV_FIXTURE_DIR", Path(__file__).resolve().parents[1] / "fixtures"))


def make_dataset(points, source="real", prefix="r"):
    n = len(points)
    return geodiv.EmbeddingDataset(
        np.asarray(points, dtype=np.float32),
        ids=[f"{prefix}{i}" for i in range(n)],
        objects=["car"] * n,
        regions=["Africa"] * n,
        source=source,
    )


def test_radii_and_metrics():
    real = make_dataset([[0, 0], [3, 0], [4, 0]])
    assert geodiv.build_manifold(real, k=1).radii == [3.0, 1.0, 1.0]
    manifold = geodiv.build_manifold(real, k=2)
    assert manifold.radii == [4.0, 3.0, 4.0]
    gen = make_dataset([[0, 0], [100, 0]], source="generated", prefix="g")
    assert geodiv.precision(manifold, gen)["value"] == 0.5
    # (0, 0) sits inside all three k=2 balls; (100, 0) inside none.
    assert geodiv.coverage(manifold, gen)["hits"] == 3


def test_self_evaluation():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(50, 6))
    manifold = geodiv.build_manifold(make_dataset(pts))
    gen = make_dataset(pts, source="generated", prefix="g")
    assert geodiv.precision(manifold, gen)["value"] == 1.0
    assert geodiv.coverage(manifold, gen)["value"] == 1.0


def test_round_trip(tmp_path):
    ds = make_dataset([[1.5, -2.0, 0.25]])
    geodiv.write_dataset(ds, tmp_path / "x.emb")
    back = geodiv.load_dataset(tmp_path / "x.emb")
    assert back == ds
    assert back.checksum() == ds.checksum()
    np.testing.assert_array_equal(back.vectors(), np.array([[1.5, -2.0, 0.25]], dtype=np.float32))


def test_errors_map_to_exceptions():
    with pytest.raises(geodiv.DataError, match="non-finite"):
        make_dataset([[0.0], [math.nan]])
    with pytest.raises(geodiv.PreconditionError):
        geodiv.build_manifold(make_dataset([[0.0], [1.0]]), k=3)
    assert issubclass(geodiv.IoError, geodiv.GeodivError)


def test_consistency_helpers():
    tenths = [i / 10 for i in range(1, 11)]
    assert geodiv.percentile_linear(tenths, 10) == pytest.approx(0.19, abs=1e-12)
    assert geodiv.lower_tail_mean(tenths, 10) == pytest.approx(0.1, abs=1e-12)
    assert geodiv.clipscore(np.array([1, 0], np.float32), np.array([1, 1], np.float32)) == pytest.approx(
        1 / math.sqrt(2), abs=1e-15
    )


def test_prompts_and_report():
    rows = geodiv.build_prompts(FIXTURES / "geode_shape" / "config.json", "object_in_region")
    assert len(rows) == 29160
    report = json.loads(geodiv.full_report_json(FIXTURES / "disparity" / "config.json"))
    assert report["region_indicator"]["RegionA"]["precision"] == 0.0
    assert report["region_indicator"]["RegionB"]["coverage"] == 1.0
