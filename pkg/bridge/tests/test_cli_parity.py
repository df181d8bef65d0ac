"""Bindings vs the core CLI on the same SFT inputs: element-identical."""

import json
import subprocess
import sys

import numpy as np

from shutterforge import Image, png_export, tensor_read
from shutterforge_bridge import metrics, synth


def run_cli(argv):
    proc = subprocess.run(
        [sys.executable, "-m", "shutterforge", *argv],
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)


def test_blur_via_bindings_matches_cli(tmp_path):
    rng = np.random.default_rng(11)
    frames = rng.random((16, 10, 10, 3)).astype(np.float32)
    src = tmp_path / "frames"
    src.mkdir()
    for t, frame in enumerate(frames):
        png_export(src / f"frame_{t:03d}.png", Image(frame), bit_depth=16)
    out = tmp_path / "triples"
    run_cli(
        [
            "synth", str(src), "--exposure", "8", "--deadtime", "0",
            "--n-latent", "3", "--crop", "8", "--out", str(out),
        ]
    )
    # feed the bindings the identical quantized frames the CLI consumed
    from shutterforge import png_import
    from shutterforge.dataset import list_frame_files

    loaded = np.stack([png_import(p).data for p in list_frame_files(src)])
    got = synth.triples(loaded, 8, 0, 3, crop=8)
    assert len(got) == 2
    for i, g in enumerate(got):
        blur = tensor_read(out / f"t{i:06d}" / "blur.sft").data
        rs = tensor_read(out / f"t{i:06d}" / "rs.sft").data
        assert np.array_equal(g["blur"], blur)
        assert np.array_equal(g["rs"], rs)
        for j in range(3):
            gt = tensor_read(out / f"t{i:06d}" / f"gt_{j:02d}.sft").data
            assert np.array_equal(g["gt"][j], gt)


def test_psnr_via_bindings_matches_cli(tmp_path):
    rng = np.random.default_rng(12)
    a = rng.random((12, 12, 1)).astype(np.float32)
    b = rng.random((12, 12, 1)).astype(np.float32)
    from shutterforge import tensor_write

    pa, pb = tmp_path / "a.sft", tmp_path / "b.sft"
    tensor_write(pa, Image(a))
    tensor_write(pb, Image(b))
    doc = run_cli(["metric", "--metric", "psnr", str(pa), str(pb)])
    assert doc["results"]["psnr"] == metrics.psnr(a, b)
