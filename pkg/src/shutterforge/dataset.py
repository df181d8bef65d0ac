"""Dataset manifests: ingest, deterministic splits, and materialization.

A manifest ("sfman/1") is a single canonical-JSON document describing how
source frame directories map to synthesized blur/RS/GT triples plus the
perturbation variants to derive from them.  Tensors live beside it as SFT
files.  Everything is deterministic given (config, seed): running ingest
or materialize twice produces byte-identical results, and splits are
assigned at scene level only, never per window.
"""

from __future__ import annotations

import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pngio, rng
from .errors import BoundsError, IngestError, ValidationError
from .perturb import PerturbSpec, low_light, spatial_shift, stereo_shift, temporal_shift_rs
from .synthesis import center_crop, synthesize_triples, window_count
from .tensors import (
    ExposureSchedule,
    FrameSequence,
    Image,
    MaskMap,
    png_import,
    tensor_bytes,
    tensor_read,
)

MANIFEST_VERSION = "sfman/1"
FRAME_PATTERN = "frame_%06d"
THREADS_ENV = "SHUTTERFORGE_THREADS"

_FRAME_EXTENSIONS = (".png", ".sft")
_SPLITS = ("train", "val", "test")


def natural_key(name: str) -> tuple:
    """Sort key treating digit runs as numbers: frame_2 < frame_10."""
    return tuple(
        int(part) if part.isdigit() else part
        for part in re.split(r"(\d+)", name)
    )


@dataclass(frozen=True)
class TripleRecord:
    window_start: int
    blur_path: str
    rs_path: str
    gt_paths: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "window_start": self.window_start,
            "blur_path": self.blur_path,
            "rs_path": self.rs_path,
            "gt_paths": list(self.gt_paths),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TripleRecord":
        return cls(
            window_start=int(obj["window_start"]),
            blur_path=obj["blur_path"],
            rs_path=obj["rs_path"],
            gt_paths=tuple(obj["gt_paths"]),
        )


@dataclass
class SceneRecord:
    scene_id: str
    source_dir: str
    frame_count: int
    crop: int
    exposure_len: int
    deadtime_len: int
    n_latent: int
    split: str = "train"
    perturbations: tuple[PerturbSpec, ...] = ()
    triples: tuple[TripleRecord, ...] = ()

    def __post_init__(self) -> None:
        if self.split not in _SPLITS:
            raise ValidationError(f"unknown split {self.split!r}")
        starts = [t.window_start for t in self.triples]
        stride = self.exposure_len + self.deadtime_len
        for prev, cur in zip(starts, starts[1:]):
            if cur - prev < stride:
                raise ValidationError(
                    f"scene {self.scene_id}: overlapping windows "
                    f"{prev} -> {cur} (stride {stride})"
                )

    def to_json(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "source_dir": self.source_dir,
            "frame_count": self.frame_count,
            "crop": self.crop,
            "exposure_len": self.exposure_len,
            "deadtime_len": self.deadtime_len,
            "n_latent": self.n_latent,
            "split": self.split,
            "perturbations": [p.to_json() for p in self.perturbations],
            "triples": [t.to_json() for t in self.triples],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SceneRecord":
        return cls(
            scene_id=obj["scene_id"],
            source_dir=obj["source_dir"],
            frame_count=int(obj["frame_count"]),
            crop=int(obj["crop"]),
            exposure_len=int(obj["exposure_len"]),
            deadtime_len=int(obj["deadtime_len"]),
            n_latent=int(obj["n_latent"]),
            split=obj.get("split", "train"),
            perturbations=tuple(
                PerturbSpec.from_json(p) for p in obj.get("perturbations", [])
            ),
            triples=tuple(TripleRecord.from_json(t) for t in obj.get("triples", [])),
        )


@dataclass
class DatasetManifest:
    version: str = MANIFEST_VERSION
    seed: int = 0
    scenes: tuple[SceneRecord, ...] = ()
    warnings: tuple[str, ...] = ()

    def to_json_str(self) -> str:
        doc = {
            "version": self.version,
            "seed": self.seed,
            "warnings": list(self.warnings),
            "scenes": [s.to_json() for s in self.scenes],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json_str(), encoding="utf-8")

    @classmethod
    def from_json_str(cls, text: str) -> "DatasetManifest":
        obj = json.loads(text)
        version = obj.get("version")
        if version != MANIFEST_VERSION:
            raise ValidationError(
                f"unsupported manifest version {version!r}, "
                f"expected {MANIFEST_VERSION!r}"
            )
        return cls(
            version=version,
            seed=int(obj.get("seed", 0)),
            scenes=tuple(SceneRecord.from_json(s) for s in obj.get("scenes", [])),
            warnings=tuple(obj.get("warnings", [])),
        )

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        return cls.from_json_str(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class IngestConfig:
    crop: int
    exposure_len: int
    deadtime_len: int
    n_latent: int
    perturbations: tuple[PerturbSpec, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        if self.exposure_len != self.crop:
            raise ValidationError(
                f"exposure_len must equal crop ({self.exposure_len} != {self.crop}) "
                "so the rolling-shutter row precondition holds"
            )
        if self.n_latent < 2:
            raise ValidationError("n_latent must be >= 2")
        if self.deadtime_len < 0:
            raise ValidationError("deadtime_len must be >= 0")


def list_frame_files(scene_dir: Path) -> list[Path]:
    """Frame files of one scene in lexicographic-numeric order."""
    files = [
        p for p in scene_dir.iterdir()
        if p.is_file() and p.suffix.lower() in _FRAME_EXTENSIONS
    ]
    return sorted(files, key=lambda p: natural_key(p.name))


def _frame_shape(path: Path) -> tuple[int, int, int]:
    if path.suffix.lower() == ".png":
        h, w, c, _depth = pngio.read_png_header(path)
        return h, w, c
    t = tensor_read(path)
    if not isinstance(t, Image):
        raise IngestError(f"{path}: SFT frame is not an image tensor")
    return t.height, t.width, t.channels


def load_frame(path: Path) -> Image:
    if path.suffix.lower() == ".png":
        return png_import(path)
    t = tensor_read(path)
    if not isinstance(t, Image):
        raise IngestError(f"{path}: SFT frame is not an image tensor")
    return t


def ingest(source_dir: str | Path, config: IngestConfig) -> DatasetManifest:
    """Build a manifest from a tree of frame directories.

    Each subdirectory of source_dir holding frame files becomes one scene;
    if source_dir itself holds frames it becomes a single scene.  Scenes
    too short for one exposure window are skipped with a warning record.
    """
    root = Path(source_dir)
    if not root.is_dir():
        raise IngestError(f"{root} is not a directory")
    scene_dirs = sorted(
        (d for d in root.iterdir() if d.is_dir()),
        key=lambda p: natural_key(p.name),
    )
    if not scene_dirs:
        scene_dirs = [root]

    scenes: list[SceneRecord] = []
    warnings: list[str] = []
    for scene_dir in scene_dirs:
        frames = list_frame_files(scene_dir)
        scene_id = scene_dir.name
        if not frames:
            warnings.append(f"scene {scene_id}: no frame files, skipped")
            continue
        shape = _frame_shape(frames[0])
        for f in frames[1:]:
            s = _frame_shape(f)
            if s != shape:
                raise IngestError(
                    f"scene {scene_id}: frame {f.name} has shape {s}, "
                    f"expected {shape}"
                )
        if config.crop > min(shape[0], shape[1]):
            raise IngestError(
                f"scene {scene_id}: crop {config.crop} exceeds frames "
                f"{shape[0]}x{shape[1]}"
            )
        n_windows = window_count(
            len(frames), config.exposure_len, config.deadtime_len
        )
        if n_windows == 0:
            warnings.append(
                f"scene {scene_id}: {len(frames)} frames < "
                f"{config.exposure_len} required for one window, skipped"
            )
            continue
        stride = config.exposure_len + config.deadtime_len
        triples = []
        for w in range(n_windows):
            start = w * stride
            tdir = f"{scene_id}/t{w:06d}"
            triples.append(
                TripleRecord(
                    window_start=start,
                    blur_path=f"{tdir}/blur.sft",
                    rs_path=f"{tdir}/rs.sft",
                    gt_paths=tuple(
                        f"{tdir}/gt_{j:02d}.sft" for j in range(config.n_latent)
                    ),
                )
            )
        scenes.append(
            SceneRecord(
                scene_id=scene_id,
                source_dir=str(scene_dir),
                frame_count=len(frames),
                crop=config.crop,
                exposure_len=config.exposure_len,
                deadtime_len=config.deadtime_len,
                n_latent=config.n_latent,
                perturbations=tuple(config.perturbations),
                triples=tuple(triples),
            )
        )
    return DatasetManifest(
        seed=config.seed, scenes=tuple(scenes), warnings=tuple(warnings)
    )


@dataclass
class MaterializeReport:
    written: int = 0
    skipped_identical: int = 0
    skipped_infeasible: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def merge(self, other: "MaterializeReport") -> None:
        self.written += other.written
        self.skipped_identical += other.skipped_identical
        self.skipped_infeasible.extend(other.skipped_infeasible)
        self.errors.extend(other.errors)


def _write_if_changed(path: Path, blob: bytes, report: MaterializeReport) -> None:
    try:
        if path.exists() and path.read_bytes() == blob:
            report.skipped_identical += 1
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(blob)
        report.written += 1
    except OSError as exc:
        report.errors.append(f"{path}: {exc}")


def variant_rs_path(rs_path: str, index: int, kind: str) -> str:
    stem, dot, ext = rs_path.rpartition(".")
    if not dot:
        return f"{rs_path}.pert{index:02d}_{kind}"
    return f"{stem}.pert{index:02d}_{kind}.{ext}"


def variant_seed(spec: PerturbSpec, scene_id: str, window_start: int, index: int) -> int:
    """Per-triple seed for one perturbation variant; shared by materialize
    and any on-the-fly consumer so both derive identical draws."""
    return rng.derive_stream(spec.seed, "variant", scene_id, window_start, index)


def perturbed_rs(
    spec: PerturbSpec,
    rs: Image,
    seq: FrameSequence,
    window: ExposureSchedule,
    seed: int,
):
    p = spec.params
    if spec.kind == "spatial_shift":
        out, _dx, _dy = spatial_shift(rs, int(p["max_offset"]), seed)
        return out
    if spec.kind == "temporal_shift":
        out, _delta = temporal_shift_rs(
            seq, window, (int(p["delta_lo"]), int(p["delta_hi"])), seed
        )
        return out
    if spec.kind == "low_light":
        g_lo = float(p.get("gamma_lo", 2.0))
        g_hi = float(p.get("gamma_hi", 3.5))
        return low_light(rs, float(p["peak"]), (g_lo, g_hi), seed)
    # stereo: disparity either a constant or an external mask file
    if "disparity_path" in p:
        disp = tensor_read(p["disparity_path"])
        if not isinstance(disp, MaskMap):
            raise IngestError(
                f"{p['disparity_path']}: stereo disparity must be a mask tensor"
            )
    else:
        disp = MaskMap(
            np.full(
                (rs.height, rs.width),
                float(p.get("disparity", 1.0)),
                dtype=np.float32,
            )
        )
    return stereo_shift(rs, disp, float(p["d_up"]))


def _materialize_scene(scene: SceneRecord, out_dir: Path) -> MaterializeReport:
    report = MaterializeReport()
    frames = list_frame_files(Path(scene.source_dir))
    try:
        seq = FrameSequence([load_frame(f) for f in frames])
        cropped = center_crop(seq, scene.crop)
        triples = synthesize_triples(
            seq,
            scene.exposure_len,
            scene.deadtime_len,
            scene.n_latent,
            scene.crop,
        )
    except Exception as exc:  # noqa: BLE001 - per-scene error channel
        report.errors.append(f"scene {scene.scene_id}: {exc}")
        return report
    for record, triple in zip(scene.triples, triples):
        _write_if_changed(out_dir / record.blur_path, tensor_bytes(triple.blur), report)
        _write_if_changed(out_dir / record.rs_path, tensor_bytes(triple.rs), report)
        for path, frame in zip(record.gt_paths, triple.gt):
            _write_if_changed(out_dir / path, tensor_bytes(frame), report)
        window = ExposureSchedule(
            scene.exposure_len, scene.deadtime_len, record.window_start
        )
        for i, spec in enumerate(scene.perturbations):
            seed = variant_seed(spec, scene.scene_id, record.window_start, i)
            vpath = out_dir / variant_rs_path(record.rs_path, i, spec.kind)
            try:
                variant = perturbed_rs(spec, triple.rs, cropped, window, seed)
            except BoundsError as exc:
                report.skipped_infeasible.append(f"{vpath}: {exc}")
                continue
            except Exception as exc:  # noqa: BLE001
                report.errors.append(f"{vpath}: {exc}")
                continue
            _write_if_changed(vpath, tensor_bytes(variant), report)
    return report


def thread_budget() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def materialize(
    manifest: DatasetManifest,
    out_dir: str | Path,
    threads: int | None = None,
) -> MaterializeReport:
    """Write every clean tensor and perturbation variant under out_dir.

    Idempotent: byte-identical existing files are left untouched.  IO
    failures are collected per file and reported together; the output
    content is independent of the thread count.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    threads = thread_budget() if threads is None else max(1, threads)
    report = MaterializeReport()
    if threads == 1 or len(manifest.scenes) <= 1:
        for scene in manifest.scenes:
            report.merge(_materialize_scene(scene, out))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for sub in pool.map(
                lambda s: _materialize_scene(s, out), manifest.scenes
            ):
                report.merge(sub)
    return report


def split_scenes(
    manifest: DatasetManifest,
    fractions: tuple[float, float, float],
    seed: int,
) -> DatasetManifest:
    """Assign train/val/test at scene level via a seeded shuffle.

    Counts follow the largest-remainder rule so they always total the
    scene count; a positive fraction that still rounds to zero scenes is
    honored as zero with a warning record.
    """
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"fractions must sum to 1, got {sum(fractions)}")
    if any(f < 0 for f in fractions):
        raise ValidationError(f"fractions must be non-negative: {fractions}")
    n = len(manifest.scenes)
    raw = [f * n for f in fractions]
    counts = [int(r) for r in raw]
    remainders = sorted(
        range(3), key=lambda i: (raw[i] - counts[i], -i), reverse=True
    )
    for i in remainders:
        if sum(counts) == n:
            break
        counts[i] += 1
    warnings = list(manifest.warnings)
    for frac, count, name in zip(fractions, counts, _SPLITS):
        if frac > 0 and count == 0:
            warnings.append(
                f"split {name}: fraction {frac} rounds to zero scenes"
            )
    order = rng.permutation(rng.derive_stream(seed, "split_scenes"), n)
    assignment = {}
    cursor = 0
    for count, name in zip(counts, _SPLITS):
        for idx in order[cursor : cursor + count]:
            assignment[idx] = name
        cursor += count
    scenes = []
    for i, scene in enumerate(manifest.scenes):
        scenes.append(
            SceneRecord(
                scene_id=scene.scene_id,
                source_dir=scene.source_dir,
                frame_count=scene.frame_count,
                crop=scene.crop,
                exposure_len=scene.exposure_len,
                deadtime_len=scene.deadtime_len,
                n_latent=scene.n_latent,
                split=assignment.get(i, "train"),
                perturbations=scene.perturbations,
                triples=scene.triples,
            )
        )
    return DatasetManifest(
        version=manifest.version,
        seed=manifest.seed,
        scenes=tuple(scenes),
        warnings=tuple(warnings),
    )
