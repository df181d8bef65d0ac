"""Minimal PNG codec: 8/16-bit, grayscale or RGB, non-interlaced.

Hand-rolled on top of zlib so that exports are byte-deterministic and
16-bit RGB round-trips work (not all imaging libraries support that
combination).  Covers exactly what the dataset pipeline needs; palette,
alpha and interlaced files are rejected.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import FormatError, WriteError

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_COMPRESS_LEVEL = 6  # fixed so identical pixels -> identical bytes


def _chunk(tag: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + tag
        + body
        + struct.pack(">I", zlib.crc32(tag + body))
    )


def write_png(path: str | Path, samples: np.ndarray, bit_depth: int) -> None:
    """Write an (H, W, C) integer sample array as a PNG file.

    C must be 1 (grayscale) or 3 (RGB); values must already be quantized
    to [0, 2**bit_depth - 1].
    """
    if bit_depth not in (8, 16):
        raise FormatError(f"unsupported PNG bit depth {bit_depth}")
    if samples.ndim != 3 or samples.shape[2] not in (1, 3):
        raise FormatError(f"PNG writer expects (H, W, 1|3), got {samples.shape}")
    h, w, c = samples.shape
    color_type = 0 if c == 1 else 2
    dtype = ">u1" if bit_depth == 8 else ">u2"
    raw = samples.astype(dtype).tobytes()
    row_bytes = w * c * (bit_depth // 8)
    # filter byte 0 (None) in front of every scanline
    body = b"".join(
        b"\x00" + raw[i * row_bytes : (i + 1) * row_bytes] for i in range(h)
    )
    ihdr = struct.pack(">IIBBBBB", w, h, bit_depth, color_type, 0, 0, 0)
    blob = (
        _SIGNATURE
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", zlib.compress(body, _COMPRESS_LEVEL))
        + _chunk(b"IEND", b"")
    )
    try:
        Path(path).write_bytes(blob)
    except OSError as exc:
        raise WriteError(f"cannot write PNG {path}: {exc}") from exc


def read_png_header(path: str | Path) -> tuple[int, int, int, int]:
    """Return (height, width, channels, bit_depth) without decoding pixels."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(8 + 8 + 13)
    except OSError as exc:
        raise FormatError(f"cannot read PNG {path}: {exc}") from exc
    return _parse_header(head, path)


def _parse_header(head: bytes, path: str | Path) -> tuple[int, int, int, int]:
    if len(head) < 29 or head[:8] != _SIGNATURE:
        raise FormatError(f"{path}: not a PNG file")
    length, tag = struct.unpack(">I4s", head[8:16])
    if tag != b"IHDR" or length != 13:
        raise FormatError(f"{path}: missing IHDR chunk")
    w, h, depth, color, comp, filt, interlace = struct.unpack(
        ">IIBBBBB", head[16:29]
    )
    if depth not in (8, 16):
        raise FormatError(f"{path}: unsupported bit depth {depth}")
    if color not in (0, 2):
        raise FormatError(f"{path}: unsupported color type {color}")
    if comp != 0 or filt != 0:
        raise FormatError(f"{path}: unsupported compression/filter method")
    if interlace != 0:
        raise FormatError(f"{path}: interlaced PNG not supported")
    channels = 1 if color == 0 else 3
    return h, w, channels, depth


def read_png(path: str | Path) -> tuple[np.ndarray, int]:
    """Decode a PNG into an (H, W, C) integer array plus its bit depth."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read PNG {path}: {exc}") from exc
    h, w, channels, depth = _parse_header(blob[:29], path)

    idat = bytearray()
    pos = 8
    while pos + 8 <= len(blob):
        length, tag = struct.unpack(">I4s", blob[pos : pos + 8])
        body = blob[pos + 8 : pos + 8 + length]
        if len(body) != length:
            raise FormatError(f"{path}: truncated chunk {tag!r}")
        if tag == b"IDAT":
            idat.extend(body)
        elif tag == b"IEND":
            break
        pos += 12 + length
    if not idat:
        raise FormatError(f"{path}: no IDAT data")

    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise FormatError(f"{path}: corrupt IDAT stream: {exc}") from exc

    bpp = channels * (depth // 8)
    row_bytes = w * bpp
    if len(raw) != h * (row_bytes + 1):
        raise FormatError(f"{path}: payload size mismatch")

    flat = np.frombuffer(raw, dtype=np.uint8).reshape(h, row_bytes + 1)
    filters = flat[:, 0]
    data = flat[:, 1:].astype(np.int32)
    out = np.zeros_like(data)
    for y in range(h):
        out[y] = _unfilter_row(filters[y], data[y], out[y - 1] if y else None, bpp, path)

    samples = out.astype(np.uint8)
    if depth == 8:
        arr = samples.reshape(h, w, channels).astype(np.uint16)
    else:
        pairs = samples.reshape(h, w, channels, 2).astype(np.uint16)
        arr = (pairs[..., 0] << np.uint16(8)) | pairs[..., 1]
    return arr, depth


def _unfilter_row(ftype, row, prev, bpp, path):
    if ftype == 0:
        return row
    if ftype == 2:  # Up
        return (row + (prev if prev is not None else 0)) & 0xFF
    out = row.copy()
    n = len(row)
    up = prev if prev is not None else np.zeros(n, dtype=np.int32)
    if ftype == 1:  # Sub
        for i in range(bpp, n):
            out[i] = (out[i] + out[i - bpp]) & 0xFF
        return out
    if ftype == 3:  # Average
        for i in range(n):
            left = out[i - bpp] if i >= bpp else 0
            out[i] = (out[i] + ((left + up[i]) >> 1)) & 0xFF
        return out
    if ftype == 4:  # Paeth
        for i in range(n):
            a = out[i - bpp] if i >= bpp else 0
            b = up[i]
            c = up[i - bpp] if i >= bpp else 0
            p = a + b - c
            pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
            if pa <= pb and pa <= pc:
                pred = a
            elif pb <= pc:
                pred = b
            else:
                pred = c
            out[i] = (out[i] + pred) & 0xFF
        return out
    raise FormatError(f"{path}: unknown filter type {ftype}")
