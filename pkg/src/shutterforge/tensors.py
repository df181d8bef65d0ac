"""Pixel, flow, mask and encoding containers plus their on-disk formats.

All containers hold row-major float32 data with a top-left origin
(y grows downward, matching the top-to-bottom scan order of a rolling
shutter).  They validate eagerly at construction, are immutable
afterwards, and are safe to share across threads.

On-disk format (SFT, bit-exact):

    bytes 0-3    magic "SFT1"
    byte  4      kind: 0=Image, 1=FlowField, 2=MaskMap, 3=EncodingMap
    byte  5      dtype: 0 = float32 little-endian
    bytes 6-7    reserved, zero
    bytes 8-11   u32 height (little-endian)
    bytes 12-15  u32 width
    bytes 16-19  u32 channels
    bytes 20-27  reserved, zero
    payload      row-major float32, little-endian

Identical tensors serialize to identical bytes, so pipeline determinism
can be checked by hashing files.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from . import pngio
from .errors import (
    ArgumentError,
    FormatError,
    ValidationError,
    WriteError,
)

_MAGIC = b"SFT1"
_HEADER = struct.Struct("<4sBBHIII8s")
HEADER_SIZE = _HEADER.size  # 28


def _freeze(data, *, expect_ndim, what: str) -> np.ndarray:
    """Convert to a read-only C-contiguous float32 array without copying
    when the input already satisfies that layout."""
    arr = np.asarray(data, dtype=np.float32, order="C")
    if arr.ndim != expect_ndim:
        raise ValidationError(
            f"{what} must have {expect_ndim} dimensions, got shape {arr.shape}"
        )
    if any(s == 0 for s in arr.shape):
        raise ValidationError(f"{what} must be non-empty, got shape {arr.shape}")
    view = arr.view()
    view.setflags(write=False)
    return view


class Image:
    """An H x W x C grid of float32 intensities in [0, 1].

    Channels must be 1 (grayscale) or 3 (RGB).  A 2-D array is accepted
    and treated as single-channel.  Values are stored as normalized sRGB;
    no linearization is applied anywhere in the package (the camera
    response is treated as identity, consistent with synthesizing blur by
    frame averaging in the sRGB domain).
    """

    __slots__ = ("data",)

    def __init__(self, data) -> None:
        arr = np.asarray(data, dtype=np.float32)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        arr = _freeze(arr, expect_ndim=3, what="image")
        if arr.shape[2] not in (1, 3):
            raise ValidationError(
                f"image channels must be 1 or 3, got {arr.shape[2]}"
            )
        if not np.isfinite(arr).all():
            raise ValidationError("image contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValidationError("image values must lie in [0, 1]")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def same_shape(self, other: "Image") -> bool:
        return self.data.shape == other.data.shape

    def __eq__(self, other) -> bool:
        return isinstance(other, Image) and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"Image({self.height}x{self.width}x{self.channels})"


class FlowField:
    """An H x W field of per-pixel (dx, dy) displacements in pixel units."""

    __slots__ = ("data",)

    def __init__(self, data) -> None:
        arr = _freeze(data, expect_ndim=3, what="flow field")
        if arr.shape[2] != 2:
            raise ValidationError(
                f"flow field needs 2 components per pixel, got {arr.shape[2]}"
            )
        if not np.isfinite(arr).all():
            raise ValidationError("flow field contains non-finite values")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, FlowField) and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"FlowField({self.height}x{self.width})"


class MaskMap:
    """An H x W field of weights in [0, 1]."""

    __slots__ = ("data",)

    def __init__(self, data) -> None:
        arr = _freeze(data, expect_ndim=2, what="mask")
        if not np.isfinite(arr).all():
            raise ValidationError("mask contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValidationError("mask values must lie in [0, 1]")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, MaskMap) and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"MaskMap({self.height}x{self.width})"


class EncodingMap:
    """An H x W field of signed row offsets, bounded by the image height."""

    __slots__ = ("data",)

    def __init__(self, data) -> None:
        arr = _freeze(data, expect_ndim=2, what="encoding map")
        if not np.isfinite(arr).all():
            raise ValidationError("encoding map contains non-finite values")
        bound = float(arr.shape[0] - 1)
        if arr.min() < -bound or arr.max() > bound:
            raise ValidationError(
                f"encoding values must lie in [{-bound}, {bound}]"
            )
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, EncodingMap) and np.array_equal(
            self.data, other.data
        )

    def __repr__(self) -> str:
        return f"EncodingMap({self.height}x{self.width})"


Tensor = Union[Image, FlowField, MaskMap, EncodingMap]


@dataclass(frozen=True)
class ExposureSchedule:
    """Frame-count description of one exposure window.

    exposure_len counts latent frames inside the window, deadtime_len the
    gap to the next window, window_start the first frame index.
    """

    exposure_len: int
    deadtime_len: int = 0
    window_start: int = 0

    def __post_init__(self) -> None:
        if self.exposure_len < 1:
            raise ValidationError("exposure_len must be >= 1")
        if self.deadtime_len < 0:
            raise ValidationError("deadtime_len must be >= 0")
        if self.window_start < 0:
            raise ValidationError("window_start must be >= 0")

    @property
    def stride(self) -> int:
        return self.exposure_len + self.deadtime_len


class FrameSequence:
    """An ordered list of same-shaped latent frames with a schedule."""

    __slots__ = ("frames", "schedule")

    def __init__(self, frames, schedule: ExposureSchedule | None = None) -> None:
        frames = tuple(frames)
        if not frames:
            raise ValidationError("frame sequence must contain at least one frame")
        first = frames[0]
        for i, f in enumerate(frames):
            if not isinstance(f, Image):
                raise ValidationError(f"frame {i} is not an Image")
            if f.data.shape != first.data.shape:
                raise ValidationError(
                    f"frame {i} shape {f.data.shape} != frame 0 shape {first.data.shape}"
                )
        self.frames = frames
        self.schedule = schedule or ExposureSchedule(exposure_len=len(frames))

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def channels(self) -> int:
        return self.frames[0].channels

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, i: int) -> Image:
        return self.frames[i]

    def stack(self) -> np.ndarray:
        """(T, H, W, C) float32 view of all frames (copies)."""
        return np.stack([f.data for f in self.frames])

    def __repr__(self) -> str:
        return (
            f"FrameSequence(n={len(self.frames)}, "
            f"{self.height}x{self.width}x{self.channels})"
        )


_KIND_CODES: dict[type, int] = {Image: 0, FlowField: 1, MaskMap: 2, EncodingMap: 3}


def _payload_array(t: Tensor) -> np.ndarray:
    return t.data


def _tensor_channels(t: Tensor) -> int:
    if isinstance(t, Image):
        return t.channels
    if isinstance(t, FlowField):
        return 2
    return 1


def tensor_bytes(t: Tensor) -> bytes:
    """Serialize a tensor into the SFT container (in memory)."""
    kind = _KIND_CODES.get(type(t))
    if kind is None:
        raise ArgumentError(f"cannot serialize object of type {type(t).__name__}")
    header = _HEADER.pack(
        _MAGIC,
        kind,
        0,
        0,
        t.data.shape[0],
        t.data.shape[1],
        _tensor_channels(t),
        b"\x00" * 8,
    )
    return header + _payload_array(t).astype("<f4").tobytes()


def tensor_write(path: str | Path, t: Tensor) -> None:
    """Write a tensor to disk; identical tensors produce identical bytes."""
    blob = tensor_bytes(t)
    try:
        Path(path).write_bytes(blob)
    except OSError as exc:
        raise WriteError(f"cannot write tensor {path}: {exc}") from exc


def tensor_from_bytes(blob: bytes, *, name: str = "<bytes>") -> Tensor:
    """Parse an SFT container; raises FormatError naming the bad offset."""
    if len(blob) < HEADER_SIZE:
        raise FormatError(f"{name}: file shorter than the 28-byte header")
    magic, kind, dtype, _res0, height, width, channels, _res1 = _HEADER.unpack(
        blob[:HEADER_SIZE]
    )
    if magic != _MAGIC:
        raise FormatError(f"{name}: bad magic {magic!r} at offset 0")
    if dtype != 0:
        raise FormatError(f"{name}: unknown dtype code {dtype} at offset 5")
    if kind > 3:
        raise FormatError(f"{name}: unknown kind code {kind} at offset 4")
    expected_channels = {1: 2, 2: 1, 3: 1}
    if kind in expected_channels and channels != expected_channels[kind]:
        raise FormatError(
            f"{name}: kind {kind} requires {expected_channels[kind]} channels, "
            f"header says {channels}"
        )
    n = height * width * channels
    payload = blob[HEADER_SIZE:]
    if len(payload) != 4 * n:
        raise FormatError(
            f"{name}: payload is {len(payload)} bytes, expected {4 * n} "
            f"for {height}x{width}x{channels}"
        )
    flat = np.frombuffer(payload, dtype="<f4")
    finite = np.isfinite(flat)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise FormatError(
            f"{name}: non-finite element at payload offset {4 * bad} "
            f"(element {bad})"
        )
    try:
        if kind == 0:
            return Image(flat.reshape(height, width, channels))
        if kind == 1:
            return FlowField(flat.reshape(height, width, 2))
        if kind == 2:
            return MaskMap(flat.reshape(height, width))
        return EncodingMap(flat.reshape(height, width))
    except ValidationError as exc:
        raise FormatError(f"{name}: invalid payload: {exc}") from exc


def tensor_read(path: str | Path) -> Tensor:
    """Read any SFT tensor back, reconstructing shape and payload exactly."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read tensor {path}: {exc}") from exc
    return tensor_from_bytes(blob, name=str(path))


def png_import(path: str | Path, bit_depth: int | None = None) -> Image:
    """Load a grayscale or RGB PNG as an Image.

    Intensities are mapped to [0, 1] by dividing by (2**bit_depth - 1).
    When bit_depth is given it must match the file; otherwise the file's
    own depth is used.
    """
    samples, depth = pngio.read_png(path)
    if bit_depth is not None and depth != bit_depth:
        raise FormatError(
            f"{path}: file is {depth}-bit, expected {bit_depth}-bit"
        )
    scale = np.float32((1 << depth) - 1)
    return Image(samples.astype(np.float32) / scale)


def png_export(path: str | Path, img: Image, bit_depth: int = 8) -> None:
    """Quantize an Image to the given depth and write it as a PNG."""
    if bit_depth not in (8, 16):
        raise ArgumentError(f"bit_depth must be 8 or 16, got {bit_depth}")
    peak = (1 << bit_depth) - 1
    q = np.rint(img.data.astype(np.float64) * peak).astype(np.int64)
    q = np.clip(q, 0, peak)
    pngio.write_png(path, q, bit_depth)
