"""Flow-driven pixel operations: warping, prompts, aggregation, block flow."""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError, ShapeError
from .tensors import FlowField, Image, MaskMap


def _require_same_hw(a, b, what: str) -> None:
    if a.data.shape[:2] != b.data.shape[:2]:
        raise ShapeError(
            f"{what}: {a.data.shape[:2]} vs {b.data.shape[:2]}"
        )


def bilinear_sample(img: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample (H, W, C) data at float coordinates, replicate-clamped.

    Coordinates are clamped to the image rectangle before interpolation,
    so out-of-range samples replicate the border.  Math runs in float64.
    """
    h, w = img.shape[:2]
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (xs - x0)[..., None]
    fy = (ys - y0)[..., None]
    data = img.astype(np.float64, copy=False)
    top = (1.0 - fx) * data[y0, x0] + fx * data[y0, x1]
    bot = (1.0 - fx) * data[y1, x0] + fx * data[y1, x1]
    return (1.0 - fy) * top + fy * bot


def backward_warp(img: Image, flow: FlowField) -> Image:
    """output(p) = bilinear sample of img at p + flow(p)."""
    _require_same_hw(img, flow, "backward_warp shape mismatch")
    h, w = img.height, img.width
    ygrid, xgrid = np.mgrid[0:h, 0:w].astype(np.float64)
    xs = xgrid + flow.data[..., 0].astype(np.float64)
    ys = ygrid + flow.data[..., 1].astype(np.float64)
    return Image(bilinear_sample(img.data, xs, ys).astype(np.float32))


def flow_diff(f_b: FlowField, f_r: FlowField) -> FlowField:
    """Element-wise flow difference; highlights complex-motion regions."""
    _require_same_hw(f_b, f_r, "flow_diff shape mismatch")
    return FlowField(f_b.data - f_r.data)


def aggregate_warped(a: Image, b: Image, m: MaskMap) -> Image:
    """Convex blend m*a + (1-m)*b, the usual mask-aggregation rule."""
    if a.data.shape != b.data.shape:
        raise ShapeError(
            f"aggregate_warped images differ: {a.data.shape} vs {b.data.shape}"
        )
    _require_same_hw(a, m, "aggregate_warped mask mismatch")
    mm = m.data.astype(np.float64)[..., None]
    out = mm * a.data.astype(np.float64) + (1.0 - mm) * b.data.astype(np.float64)
    return Image(out.astype(np.float32))


def flow_magnitude(f: FlowField) -> np.ndarray:
    """Per-pixel Euclidean norm of the flow; raw float32 field, unbounded."""
    dx = f.data[..., 0].astype(np.float64)
    dy = f.data[..., 1].astype(np.float64)
    return np.sqrt(dx * dx + dy * dy).astype(np.float32)


def block_flow(a: Image, b: Image, block: int, radius: int) -> FlowField:
    """Exhaustive SAD block matching from a to b.

    For each block x block tile of `a`, returns the integer displacement
    in [-radius, radius]^2 minimizing the sum of absolute differences
    against `b` (replicate-padded).  Ties go to the smallest displacement
    magnitude, then lexicographic (dy, dx).  The winning displacement is
    broadcast to every pixel of the tile.
    """
    if a.data.shape != b.data.shape:
        raise ShapeError(
            f"block_flow images differ: {a.data.shape} vs {b.data.shape}"
        )
    h, w = a.height, a.width
    if block < 1 or h % block or w % block:
        raise ArgumentError(
            f"block {block} must divide image dims {h}x{w}"
        )
    if radius < 0:
        raise ArgumentError(f"radius must be >= 0, got {radius}")

    by, bx = h // block, w // block
    ref = a.data.astype(np.float64)
    padded = np.pad(
        b.data.astype(np.float64),
        ((radius, radius), (radius, radius), (0, 0)),
        mode="edge",
    )
    candidates = sorted(
        ((dy, dx) for dy in range(-radius, radius + 1)
         for dx in range(-radius, radius + 1)),
        key=lambda d: (d[0] * d[0] + d[1] * d[1], d[0], d[1]),
    )
    best_sad = np.full((by, bx), np.inf)
    best_dy = np.zeros((by, bx), dtype=np.int64)
    best_dx = np.zeros((by, bx), dtype=np.int64)
    for dy, dx in candidates:
        shifted = padded[radius + dy : radius + dy + h, radius + dx : radius + dx + w]
        diff = np.abs(ref - shifted)
        sad = diff.reshape(by, block, bx, block, -1).sum(axis=(1, 3, 4))
        better = sad < best_sad  # strict: earlier candidate wins ties
        best_sad = np.where(better, sad, best_sad)
        best_dy = np.where(better, dy, best_dy)
        best_dx = np.where(better, dx, best_dx)

    flow = np.empty((h, w, 2), dtype=np.float32)
    flow[..., 0] = np.repeat(np.repeat(best_dx, block, axis=0), block, axis=1)
    flow[..., 1] = np.repeat(np.repeat(best_dy, block, axis=0), block, axis=1)
    return FlowField(flow)
