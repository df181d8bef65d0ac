"""Command-line surface binding all modules into reproducible pipelines.

Every subcommand prints a JSON report {"command", "params", "results"} to
stdout; tensors go to --out paths only.  Exit codes: 0 success, 1
computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset as ds
from . import distill, encoding, metrics, perturb, synthesis
from .errors import ArgumentError, ShutterForgeError
from .tensors import (
    ExposureSchedule,
    FlowField,
    FrameSequence,
    Image,
    MaskMap,
    png_export,
    png_import,
    tensor_read,
    tensor_write,
)


def _load_tensor(path: str):
    if path.lower().endswith(".png"):
        return png_import(path)
    return tensor_read(path)


def _load_image(path: str) -> Image:
    t = _load_tensor(path)
    if not isinstance(t, Image):
        raise ArgumentError(f"{path}: expected an image tensor")
    return t


def _load_flow(path: str) -> FlowField:
    t = tensor_read(path)
    if not isinstance(t, FlowField):
        raise ArgumentError(f"{path}: expected a flow tensor")
    return t


def _load_mask(path: str) -> MaskMap:
    t = tensor_read(path)
    if not isinstance(t, MaskMap):
        raise ArgumentError(f"{path}: expected a mask tensor")
    return t


def _load_clip(paths: list[str]) -> FrameSequence:
    return FrameSequence([_load_image(p) for p in paths])


def _report(command: str, params: dict, results: dict) -> None:
    doc = {"command": command, "params": params, "results": results}
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _cmd_synth(args) -> int:
    frames = ds.list_frame_files(Path(args.source))
    if not frames:
        raise ArgumentError(f"{args.source}: no frame files found")
    seq = FrameSequence([ds.load_frame(f) for f in frames])
    triples = synthesis.synthesize_triples(
        seq, args.exposure, args.deadtime, args.n_latent, args.crop
    )
    out = Path(args.out)
    for i, t in enumerate(triples):
        tdir = out / f"t{i:06d}"
        tdir.mkdir(parents=True, exist_ok=True)
        tensor_write(tdir / "blur.sft", t.blur)
        tensor_write(tdir / "rs.sft", t.rs)
        for j, g in enumerate(t.gt):
            tensor_write(tdir / f"gt_{j:02d}.sft", g)
    _report(
        "synth",
        {
            "source": args.source,
            "exposure": args.exposure,
            "deadtime": args.deadtime,
            "n_latent": args.n_latent,
            "crop": args.crop,
            "seed": args.seed,
            "out": args.out,
        },
        {"triples": len(triples), "frames": len(frames)},
    )
    return 0


def _perturb_params(args) -> dict:
    if args.kind == "spatial_shift":
        return {"max_offset": args.max_offset}
    if args.kind == "temporal_shift":
        return {"delta_lo": args.delta_lo, "delta_hi": args.delta_hi}
    if args.kind == "low_light":
        return {
            "peak": args.peak,
            "gamma_lo": args.gamma_lo,
            "gamma_hi": args.gamma_hi,
        }
    params: dict = {"d_up": args.d_up}
    if args.disparity_path:
        params["disparity_path"] = args.disparity_path
    else:
        params["disparity"] = args.disparity
    return params


def _cmd_perturb(args) -> int:
    params = _perturb_params(args)
    spec = perturb.PerturbSpec(kind=args.kind, params=params, seed=args.seed)
    echo = {"kind": args.kind, "seed": args.seed, **params}
    src = Path(args.input)

    if src.suffix.lower() == ".json":
        manifest = ds.DatasetManifest.load(src)
        scenes = tuple(
            ds.SceneRecord(
                scene_id=s.scene_id,
                source_dir=s.source_dir,
                frame_count=s.frame_count,
                crop=s.crop,
                exposure_len=s.exposure_len,
                deadtime_len=s.deadtime_len,
                n_latent=s.n_latent,
                split=s.split,
                perturbations=s.perturbations + (spec,),
                triples=s.triples,
            )
            for s in manifest.scenes
        )
        updated = ds.DatasetManifest(
            version=manifest.version,
            seed=manifest.seed,
            scenes=scenes,
            warnings=manifest.warnings,
        )
        updated.save(args.out)
        _report("perturb", echo, {"manifest": args.out, "scenes": len(scenes)})
        return 0

    results: dict = {}
    if args.kind == "temporal_shift":
        if not src.is_dir():
            raise ArgumentError(
                "temporal_shift needs a directory of frames as input"
            )
        seq = FrameSequence([ds.load_frame(f) for f in ds.list_frame_files(src)])
        window = ExposureSchedule(
            args.exposure, args.deadtime, args.window_start
        )
        out_img, delta = perturb.temporal_shift_rs(
            seq, window, (args.delta_lo, args.delta_hi), args.seed
        )
        results["delta"] = delta
    else:
        img = _load_image(args.input)
        if args.kind == "spatial_shift":
            out_img, dx, dy = perturb.spatial_shift(img, args.max_offset, args.seed)
            results["dx"], results["dy"] = dx, dy
        elif args.kind == "low_light":
            out_img = perturb.low_light(
                img, args.peak, (args.gamma_lo, args.gamma_hi), args.seed
            )
        else:
            if args.disparity_path:
                disparity = _load_mask(args.disparity_path)
            else:
                disparity = MaskMap(
                    np.full((img.height, img.width), args.disparity, np.float32)
                )
            out_img = perturb.stereo_shift(img, disparity, args.d_up)
    tensor_write(args.out, out_img)
    results["out"] = args.out
    _report("perturb", echo, results)
    return 0


def _cmd_encode(args) -> int:
    maps = encoding.tpe_relative(args.height, args.n_latent, args.width)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for t, m in enumerate(maps):
        path = out / f"tpe_{t:02d}.sft"
        tensor_write(path, m)
        files.append(str(path))
    _report(
        "encode",
        {"height": args.height, "width": args.width, "n_latent": args.n_latent,
         "out": args.out},
        {"files": files},
    )
    return 0


def _cmd_mask(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results: dict = {}
    m_d = [distill.mask_dynamic(_load_flow(p), args.k) for p in args.flow or []]
    m_b = (
        distill.mask_boundary(_load_clip(args.gt)) if args.gt else []
    )
    m_e = []
    if args.student and args.teacher and args.gt:
        m_e = distill.mask_error(
            _load_clip(args.student), _load_clip(args.teacher),
            _load_clip(args.gt),
        )
    for name, masks in (("m_d", m_d), ("m_b", m_b), ("m_e", m_e)):
        for i, m in enumerate(masks):
            tensor_write(out / f"{name}_{i:02d}.sft", m)
        if masks:
            results[name] = [float(m.data.mean()) for m in masks]
    if m_d and m_b and m_e:
        weights = distill.MaskWeights(*args.weights)
        n = min(len(m_d), len(m_b), len(m_e))
        combined = [
            distill.mask_combine(
                m_d[i if len(m_d) > 1 else 0], m_b[i], m_e[i], weights
            )
            for i in range(n)
        ]
        for i, m in enumerate(combined):
            tensor_write(out / f"m_{i:02d}.sft", m)
        results["m"] = [float(m.data.mean()) for m in combined]
    if not results:
        raise ArgumentError(
            "nothing to compute: pass --flow, --gt, or student/teacher/gt clips"
        )
    _report(
        "mask",
        {"k": args.k, "weights": list(args.weights), "out": args.out},
        results,
    )
    return 0


def _cmd_loss(args) -> int:
    results: dict = {}
    gt = _load_clip(args.gt)
    if args.student:
        results["l_rec"] = distill.loss_charbonnier(
            _load_clip(args.student), gt, args.eps, args.charbonnier
        )
    if args.teacher:
        results["l_rec_t"] = distill.loss_charbonnier(
            _load_clip(args.teacher), gt, args.eps, args.charbonnier
        )
    if args.student_flow and args.teacher_flow:
        fs = [_load_flow(p) for p in args.student_flow]
        ft = [_load_flow(p) for p in args.teacher_flow]
        if args.mask:
            mask = _load_mask(args.mask)
        else:
            mask = MaskMap(
                np.ones((fs[0].height, fs[0].width), dtype=np.float32)
            )
        results["l_dis"] = distill.loss_distill(fs, ft, mask)
    if {"l_rec", "l_rec_t", "l_dis"} <= results.keys():
        results["l_total"] = distill.loss_total(
            results["l_rec"], results["l_rec_t"], results["l_dis"],
            args.lambda_d,
        )
    _report(
        "loss",
        {"eps": args.eps, "lambda_d": args.lambda_d,
         "charbonnier": args.charbonnier},
        results,
    )
    return 0


def _cmd_metric(args) -> int:
    name = args.metric
    params: dict = {"metric": name}
    results: dict = {}
    if name in ("mse", "psnr", "ssim", "abs_rel", "delta"):
        if len(args.inputs) != 2:
            raise ArgumentError(f"metric {name} needs exactly two tensors")
        a, b = _load_image(args.inputs[0]), _load_image(args.inputs[1])
        if name == "mse":
            results["mse"] = metrics.mse(a, b)
        elif name == "psnr":
            results["psnr"] = metrics.psnr(a, b)
        elif name == "ssim":
            results["ssim"] = metrics.ssim(a, b)
        elif name == "abs_rel":
            params["valid_min"] = args.valid_min
            results["abs_rel"] = metrics.abs_rel(a, b, args.valid_min)
        else:
            params["thr"] = args.thr
            params["valid_min"] = args.valid_min
            results["delta"] = metrics.delta_accuracy(
                a, b, args.thr, args.valid_min
            )
    elif name == "tof":
        if not args.pred or not args.gt:
            raise ArgumentError("tof needs --pred and --gt frame lists")
        params["block"], params["radius"] = args.block, args.radius
        results["tof"] = metrics.tof(
            _load_clip(args.pred), _load_clip(args.gt), args.block, args.radius
        )
    elif name == "profile":
        if not args.seq:
            raise ArgumentError("profile needs --seq frame list")
        if not args.out:
            raise ArgumentError("profile needs --out for the image")
        params["column"] = args.column
        profile = metrics.temporal_profile(_load_clip(args.seq), args.column)
        if args.out.lower().endswith(".png"):
            png_export(args.out, profile)
        else:
            tensor_write(args.out, profile)
        results["out"] = args.out
        results["shape"] = [profile.height, profile.width, profile.channels]
    else:
        raise ArgumentError(f"unknown metric {name!r}")
    _report("metric", params, results)
    return 0


def _parse_perturb_flag(text: str) -> perturb.PerturbSpec:
    # format: kind:key=val,key=val
    kind, _, body = text.partition(":")
    params: dict = {}
    seed = 0
    if body:
        for pair in body.split(","):
            key, _, val = pair.partition("=")
            if key == "seed":
                seed = int(val)
            else:
                params[key] = float(val)
    return perturb.PerturbSpec(kind=kind, params=params, seed=seed)


def _cmd_dataset(args) -> int:
    if args.dataset_cmd == "ingest":
        specs = tuple(_parse_perturb_flag(p) for p in args.perturb or [])
        config = ds.IngestConfig(
            crop=args.crop,
            exposure_len=args.exposure,
            deadtime_len=args.deadtime,
            n_latent=args.n_latent,
            perturbations=specs,
            seed=args.seed,
        )
        manifest = ds.ingest(args.source, config)
        manifest.save(args.out)
        _report(
            "dataset.ingest",
            {"source": args.source, "exposure": args.exposure,
             "deadtime": args.deadtime, "n_latent": args.n_latent,
             "crop": args.crop, "seed": args.seed, "out": args.out},
            {"scenes": len(manifest.scenes),
             "triples": sum(len(s.triples) for s in manifest.scenes),
             "warnings": list(manifest.warnings)},
        )
        return 0
    if args.dataset_cmd == "materialize":
        manifest = ds.DatasetManifest.load(args.manifest)
        report = ds.materialize(manifest, args.out, args.threads)
        _report(
            "dataset.materialize",
            {"manifest": args.manifest, "out": args.out},
            {"written": report.written,
             "skipped_identical": report.skipped_identical,
             "skipped_infeasible": report.skipped_infeasible,
             "errors": report.errors},
        )
        return 0 if report.ok else 1
    # split
    fractions = tuple(float(x) for x in args.fractions.split(","))
    if len(fractions) != 3:
        raise ArgumentError("fractions must be three comma-separated numbers")
    manifest = ds.DatasetManifest.load(args.manifest)
    updated = ds.split_scenes(manifest, fractions, args.seed)
    updated.save(args.out)
    counts = {
        name: sum(1 for s in updated.scenes if s.split == name)
        for name in ("train", "val", "test")
    }
    _report(
        "dataset.split",
        {"manifest": args.manifest, "fractions": list(fractions),
         "seed": args.seed, "out": args.out},
        {"counts": counts},
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shutterforge",
        description="Cross-shutter synthesis, distillation masks, losses and metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize blur/RS/GT triples from frames")
    p.add_argument("source")
    p.add_argument("--exposure", type=int, required=True)
    p.add_argument("--deadtime", type=int, default=0)
    p.add_argument("--n-latent", type=int, required=True)
    p.add_argument("--crop", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("perturb", help="apply one perturbation")
    p.add_argument("input", help="tensor file, frame directory, or manifest .json")
    p.add_argument("--kind", required=True, choices=perturb.PERTURB_KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--max-offset", type=int, default=0)
    p.add_argument("--delta-lo", type=int, default=0)
    p.add_argument("--delta-hi", type=int, default=0)
    p.add_argument("--window-start", type=int, default=0)
    p.add_argument("--exposure", type=int, default=0)
    p.add_argument("--deadtime", type=int, default=0)
    p.add_argument("--peak", type=float, default=500.0)
    p.add_argument("--gamma-lo", type=float, default=perturb.DEFAULT_GAMMA_RANGE[0])
    p.add_argument("--gamma-hi", type=float, default=perturb.DEFAULT_GAMMA_RANGE[1])
    p.add_argument("--d-up", type=float, default=0.0)
    p.add_argument("--disparity", type=float, default=1.0)
    p.add_argument("--disparity-path", default=None)
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("encode", help="emit temporal positional encoding maps")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--n-latent", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("mask", help="compute distillation masks")
    p.add_argument("--flow", action="append")
    p.add_argument("--gt", action="append")
    p.add_argument("--student", action="append")
    p.add_argument("--teacher", action="append")
    p.add_argument("--k", type=float, default=distill.DEFAULT_OUTLIER_COEFF)
    p.add_argument(
        "--weights",
        type=lambda s: tuple(float(x) for x in s.split(",")),
        default=(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mask)

    p = sub.add_parser("loss", help="compute reconstruction/distillation losses")
    p.add_argument("--student", action="append")
    p.add_argument("--teacher", action="append")
    p.add_argument("--gt", action="append", required=True)
    p.add_argument("--student-flow", action="append")
    p.add_argument("--teacher-flow", action="append")
    p.add_argument("--mask", default=None)
    p.add_argument("--eps", type=float, default=distill.DEFAULT_CHARBONNIER_EPS)
    p.add_argument("--lambda-d", type=float, default=distill.DEFAULT_LAMBDA_D)
    p.add_argument(
        "--charbonnier", choices=("elementwise", "global"), default="elementwise"
    )
    p.set_defaults(func=_cmd_loss)

    p = sub.add_parser("metric", help="compute a quality/alignment metric")
    p.add_argument("inputs", nargs="*")
    p.add_argument(
        "--metric", required=True,
        choices=("mse", "psnr", "ssim", "abs_rel", "delta", "tof", "profile"),
    )
    p.add_argument("--thr", type=float, default=1.25)
    p.add_argument("--valid-min", type=float, default=metrics.DEFAULT_VALID_MIN)
    p.add_argument("--block", type=int, default=8)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--column", type=int, default=0)
    p.add_argument("--pred", action="append")
    p.add_argument("--gt", action="append")
    p.add_argument("--seq", action="append")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_metric)

    p = sub.add_parser("dataset", help="ingest / materialize / split datasets")
    dsub = p.add_subparsers(dest="dataset_cmd", required=True)

    q = dsub.add_parser("ingest")
    q.add_argument("source")
    q.add_argument("--exposure", type=int, required=True)
    q.add_argument("--deadtime", type=int, default=0)
    q.add_argument("--n-latent", type=int, required=True)
    q.add_argument("--crop", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--perturb", action="append",
                   help="kind:key=val,... e.g. low_light:peak=500,seed=7")
    q.add_argument("--out", required=True)
    q.set_defaults(func=_cmd_dataset)

    q = dsub.add_parser("materialize")
    q.add_argument("manifest")
    q.add_argument("--out", required=True)
    q.add_argument("--threads", type=int, default=None)
    q.set_defaults(func=_cmd_dataset)

    q = dsub.add_parser("split")
    q.add_argument("manifest")
    q.add_argument("--fractions", required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=_cmd_dataset)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ShutterForgeError as exc:
        json.dump(
            {"error": type(exc).__name__, "message": str(exc)},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
