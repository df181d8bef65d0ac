"""Reference on-the-fly dataset iterator for training pipelines.

Walks a materialized manifest in order and yields one tuple per triple:

    (blur, rs, gt, encoding)

blur/rs are (H, W, C) float32 arrays loaded from the materialized SFT
files, gt is the (N, H, W, C) latent stack, and encoding is the (N, H, W)
stack of relative temporal positional encodings for the scene geometry.

perturbation_index selects one entry of the scene's perturbation list to
apply to the RS view on the fly; the per-triple seed derivation is shared
with materialization, so the stream is bit-identical to the corresponding
rs variant files on disk.  Single-consumer; deterministic given
(manifest, seed).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from shutterforge import (
    DatasetManifest,
    ExposureSchedule,
    FrameSequence,
    center_crop,
    tensor_read,
    tpe_relative,
)
from shutterforge.dataset import (
    SceneRecord,
    list_frame_files,
    load_frame,
    perturbed_rs,
    variant_seed,
)


class DatasetIterator:
    """Iterate (blur, rs, gt, encoding) tuples in manifest order."""

    def __init__(
        self,
        manifest_path: str | Path,
        data_dir: str | Path,
        perturbation_index: int | None = None,
    ) -> None:
        self.manifest = DatasetManifest.load(manifest_path)
        self.data_dir = Path(data_dir)
        self.perturbation_index = perturbation_index

    def __len__(self) -> int:
        return sum(len(s.triples) for s in self.manifest.scenes)

    def _encoding(self, scene: SceneRecord) -> np.ndarray:
        maps = tpe_relative(scene.crop, scene.n_latent)
        return np.stack([m.data for m in maps])

    def _source_clip(self, scene: SceneRecord) -> FrameSequence:
        frames = list_frame_files(Path(scene.source_dir))
        return center_crop(
            FrameSequence([load_frame(f) for f in frames]), scene.crop
        )

    def __iter__(self):
        idx = self.perturbation_index
        for scene in self.manifest.scenes:
            encoding = self._encoding(scene)
            apply_spec = idx is not None and idx < len(scene.perturbations)
            cropped = self._source_clip(scene) if apply_spec else None
            for record in scene.triples:
                blur = tensor_read(self.data_dir / record.blur_path).data
                rs_img = tensor_read(self.data_dir / record.rs_path)
                gt = np.stack(
                    [
                        tensor_read(self.data_dir / p).data
                        for p in record.gt_paths
                    ]
                )
                if apply_spec:
                    spec = scene.perturbations[idx]
                    window = ExposureSchedule(
                        scene.exposure_len,
                        scene.deadtime_len,
                        record.window_start,
                    )
                    seed = variant_seed(
                        spec, scene.scene_id, record.window_start, idx
                    )
                    rs_img = perturbed_rs(spec, rs_img, cropped, window, seed)
                yield blur, rs_img.data, gt, encoding
