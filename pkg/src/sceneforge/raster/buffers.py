"""Frame buffers and their on-disk formats.

Arrays are row-major (H, W[, C]): pixel x is the column index, pixel y the
row. RGB is float32 in [0,1] written as binary PPM (P6, maxval 255). Masks
are uint16 written as binary PGM (P5, maxval 65535, big-endian samples per
the PGM standard); instance id 0 is background. Depth is camera-space z in
meters, +inf at background pixels, written as raw little-endian float32 with
a 16-byte header: magic ``DEPTHF32`` then W and H as little-endian uint32.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEPTH_MAGIC = b"DEPTHF32"


@dataclass
class FrameBuffers:
    rgb: np.ndarray  # (H, W, 3) float32 in [0,1]
    depth: np.ndarray  # (H, W) float32, +inf background
    instance_mask: np.ndarray  # (H, W) uint16, 0 background
    category_mask: np.ndarray  # (H, W) uint16, 0 background

    @property
    def size(self) -> tuple[int, int]:
        h, w = self.depth.shape
        return (w, h)


@dataclass
class Coverage:
    count: int
    centroid: tuple[float, float] | None  # (x, y) mean pixel coordinate
    bbox: tuple[int, int, int, int] | None  # (x0, y0, x1, y1) inclusive


def pixel_coverage(buffers: FrameBuffers, instance_id: int) -> Coverage:
    """Pixel count, centroid, and bbox of one instance in the mask."""
    ys, xs = np.nonzero(buffers.instance_mask == instance_id)
    if xs.size == 0:
        return Coverage(count=0, centroid=None, bbox=None)
    return Coverage(
        count=int(xs.size),
        centroid=(float(xs.mean()), float(ys.mean())),
        bbox=(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max())),
    )


def write_ppm(path: str | Path, rgb: np.ndarray) -> None:
    h, w, _ = rgb.shape
    data = np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(data.tobytes())


def read_ppm(path: str | Path) -> np.ndarray:
    with open(path, "rb") as f:
        magic, dims, maxval = _read_pnm_header(f, b"P6")
        w, h = dims
        data = np.frombuffer(f.read(w * h * 3), dtype=np.uint8)
    return (data.reshape(h, w, 3).astype(np.float32)) / float(maxval)


def write_pgm16(path: str | Path, mask: np.ndarray) -> None:
    h, w = mask.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        f.write(mask.astype(">u2").tobytes())


def read_pgm16(path: str | Path) -> np.ndarray:
    with open(path, "rb") as f:
        magic, dims, maxval = _read_pnm_header(f, b"P5")
        w, h = dims
        data = np.frombuffer(f.read(w * h * 2), dtype=">u2")
    return data.reshape(h, w).astype(np.uint16)


def _read_pnm_header(f, expected_magic: bytes):
    def token():
        tok = b""
        while True:
            ch = f.read(1)
            if ch in b" \t\r\n":
                if tok:
                    return tok
                continue
            if ch == b"#":
                while f.read(1) not in b"\r\n":
                    pass
                continue
            if not ch:
                raise ValueError("truncated PNM header")
            tok += ch

    magic = token()
    if magic != expected_magic:
        raise ValueError(f"bad magic {magic!r}, expected {expected_magic!r}")
    w, h, maxval = int(token()), int(token()), int(token())
    return magic, (w, h), maxval


def write_depth(path: str | Path, depth: np.ndarray) -> None:
    h, w = depth.shape
    with open(path, "wb") as f:
        f.write(DEPTH_MAGIC)
        f.write(struct.pack("<II", w, h))
        f.write(depth.astype("<f4").tobytes())


def read_depth(path: str | Path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != DEPTH_MAGIC:
            raise ValueError(f"bad depth magic {magic!r}")
        w, h = struct.unpack("<II", f.read(8))
        data = np.frombuffer(f.read(w * h * 4), dtype="<f4")
    return data.reshape(h, w).astype(np.float32)
