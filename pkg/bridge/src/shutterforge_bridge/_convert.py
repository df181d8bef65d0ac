"""Array interchange between training pipelines and the core containers.

Inputs must be float32 ndarrays of the documented shape; anything else
raises TypeError/ValueError before the core is invoked.  Conversion into
core containers is zero-copy for C-contiguous input (the core wraps a
read-only view); only non-contiguous arrays are copied.  Outputs are the
core's own read-only arrays, never recomputed or duplicated.
"""

from __future__ import annotations

import numpy as np

from shutterforge import FlowField, FrameSequence, Image, MaskMap


def require_array(arr, ndim, what: str) -> np.ndarray:
    if not isinstance(arr, np.ndarray):
        raise TypeError(f"{what} must be a numpy array, got {type(arr).__name__}")
    if arr.dtype != np.float32:
        raise TypeError(f"{what} must be float32, got {arr.dtype}")
    if arr.ndim != ndim:
        raise ValueError(f"{what} must have {ndim} dims, got shape {arr.shape}")
    return arr


def as_image(arr, what: str = "image") -> Image:
    if isinstance(arr, np.ndarray) and arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    return Image(require_array(arr, 3, what))


def as_flow(arr, what: str = "flow") -> FlowField:
    require_array(arr, 3, what)
    if arr.shape[2] != 2:
        raise ValueError(f"{what} needs 2 components, got {arr.shape[2]}")
    return FlowField(arr)


def as_mask(arr, what: str = "mask") -> MaskMap:
    return MaskMap(require_array(arr, 2, what))


def as_clip(arr, what: str = "clip") -> FrameSequence:
    """(T, H, W, C) stack -> FrameSequence of per-frame views."""
    require_array(arr, 4, what)
    return FrameSequence([Image(f) for f in arr])


def clip_to_stack(seq: FrameSequence) -> np.ndarray:
    return np.stack([f.data for f in seq.frames])
