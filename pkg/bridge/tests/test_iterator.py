"""Dataset iterator: manifest order, exact reproduction, determinism."""

import numpy as np
import pytest

from shutterforge import (
    DatasetManifest,
    Image,
    IngestConfig,
    PerturbSpec,
    ingest,
    materialize,
    png_export,
    tensor_read,
    tpe_relative,
)
from shutterforge.dataset import variant_rs_path
from shutterforge_bridge import DatasetIterator


@pytest.fixture()
def corpus(tmp_path):
    src = tmp_path / "src"
    rng = np.random.default_rng(2718)
    for name, n_frames, seed in (("a", 30, 1), ("b", 20, 2)):
        scene = src / name
        scene.mkdir(parents=True)
        base = np.random.default_rng(seed).random((12, 12, 3)).astype(np.float32)
        for t in range(n_frames):
            png_export(
                scene / f"frame_{t:06d}.png", Image(np.roll(base, t, axis=1))
            )
    config = IngestConfig(
        crop=8,
        exposure_len=8,
        deadtime_len=2,
        n_latent=3,
        perturbations=(
            PerturbSpec("spatial_shift", {"max_offset": 3}, seed=5),
            PerturbSpec(
                "low_light", {"peak": 400.0, "gamma_lo": 1.0, "gamma_hi": 2.0},
                seed=6,
            ),
        ),
        seed=0,
    )
    manifest = ingest(src, config)
    manifest_path = tmp_path / "manifest.json"
    manifest.save(manifest_path)
    data_dir = tmp_path / "data"
    report = materialize(manifest, data_dir)
    assert report.ok
    return manifest_path, data_dir


def test_yields_every_triple_in_manifest_order(corpus):
    manifest_path, data_dir = corpus
    manifest = DatasetManifest.load(manifest_path)
    it = DatasetIterator(manifest_path, data_dir)
    records = [
        (scene, record)
        for scene in manifest.scenes
        for record in scene.triples
    ]
    tuples = list(it)
    assert len(tuples) == len(it) == len(records)
    for (scene, record), (blur, rs, gt, enc) in zip(records, tuples):
        assert np.array_equal(
            blur, tensor_read(data_dir / record.blur_path).data
        )
        assert np.array_equal(rs, tensor_read(data_dir / record.rs_path).data)
        for j, p in enumerate(record.gt_paths):
            assert np.array_equal(gt[j], tensor_read(data_dir / p).data)
        expected_enc = np.stack(
            [m.data for m in tpe_relative(scene.crop, scene.n_latent)]
        )
        assert np.array_equal(enc, expected_enc)


def test_three_triple_manifest_yields_three_tuples(tmp_path):
    src = tmp_path / "src" / "only"
    src.mkdir(parents=True)
    base = np.random.default_rng(3).random((10, 10, 1)).astype(np.float32)
    for t in range(30):  # 3 windows of (8 + 2)
        png_export(src / f"frame_{t:06d}.png", Image(np.roll(base, t, axis=0)))
    config = IngestConfig(crop=8, exposure_len=8, deadtime_len=2, n_latent=3)
    manifest = ingest(tmp_path / "src", config)
    mp = tmp_path / "m.json"
    manifest.save(mp)
    data = tmp_path / "data"
    materialize(manifest, data)
    tuples = list(DatasetIterator(mp, data))
    assert len(tuples) == 3
    for blur, rs, gt, enc in tuples:
        assert blur.shape == (8, 8, 1)
        assert rs.shape == (8, 8, 1)
        assert gt.shape == (3, 8, 8, 1)
        assert enc.shape == (3, 8, 8)


@pytest.mark.parametrize("index", [0, 1])
def test_perturbed_stream_matches_materialized_variants(corpus, index):
    manifest_path, data_dir = corpus
    manifest = DatasetManifest.load(manifest_path)
    it = DatasetIterator(manifest_path, data_dir, perturbation_index=index)
    records = [
        (scene, record)
        for scene in manifest.scenes
        for record in scene.triples
    ]
    for (scene, record), (_blur, rs, _gt, _enc) in zip(records, it):
        spec = scene.perturbations[index]
        variant = data_dir / variant_rs_path(record.rs_path, index, spec.kind)
        assert np.array_equal(rs, tensor_read(variant).data)


def test_iteration_is_deterministic(corpus):
    manifest_path, data_dir = corpus
    a = list(DatasetIterator(manifest_path, data_dir, perturbation_index=1))
    b = list(DatasetIterator(manifest_path, data_dir, perturbation_index=1))
    for (b1, r1, g1, e1), (b2, r2, g2, e2) in zip(a, b):
        assert np.array_equal(b1, b2)
        assert np.array_equal(r1, r2)
        assert np.array_equal(g1, g2)
        assert np.array_equal(e1, e2)
