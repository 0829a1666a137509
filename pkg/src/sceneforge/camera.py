"""Pinhole cameras and ring placement around a scene center.

Image convention: pixel x grows rightward, pixel y grows downward, and the
principal point sits at the image center (W/2, H/2). Depth is camera-space z
(distance along the view axis, not the Euclidean ray length). The focal
length in pixels is (H/2)/tan(fov/2) for the vertical field of view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import Stream

RING_RADIUS_RANGE = (2.5, 5.0)
RING_HEIGHT_RANGE = (1.2, 2.0)

_WORLD_UP = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class Camera:
    camera_id: str
    position: tuple[float, float, float]
    look_at: tuple[float, float, float]
    vertical_fov: float  # radians, in (0, pi)
    image_size: tuple[int, int]  # (W, H)

    def __post_init__(self):
        if self.position == self.look_at:
            raise ValueError(f"{self.camera_id}: position equals look_at")
        if not 0.0 < self.vertical_fov < math.pi:
            raise ValueError(f"{self.camera_id}: vertical_fov out of (0, pi)")
        w, h = self.image_size
        if w < 16 or h < 16:
            raise ValueError(f"{self.camera_id}: image_size must be at least 16x16")

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(right, up, forward) orthonormal world-space axes."""
        fwd = np.asarray(self.look_at, dtype=float) - np.asarray(self.position, dtype=float)
        fwd = fwd / np.linalg.norm(fwd)
        right = np.cross(_WORLD_UP, fwd)
        n = np.linalg.norm(right)
        if n < 1e-12:  # looking straight up/down
            right = np.array([1.0, 0.0, 0.0])
        else:
            right = right / n
        up = np.cross(fwd, right)
        return right, up, fwd

    @property
    def focal_px(self) -> float:
        return (self.image_size[1] / 2.0) / math.tan(self.vertical_fov / 2.0)


@dataclass(frozen=True)
class CameraRig:
    center: tuple[float, float, float]
    cameras: tuple[Camera, ...]

    def __post_init__(self):
        if not 4 <= len(self.cameras) <= 12:
            raise ValueError(f"camera count {len(self.cameras)} out of [4, 12]")


def place_camera_ring(
    center,
    n: int,
    stream: Stream,
    image_size: tuple[int, int] = (128, 128),
    vertical_fov: float = math.pi / 3.0,
) -> CameraRig:
    """Evenly spaced ring of n cameras, all aimed at ``center``.

    The whole ring shares one random phase, radius, and height, so consecutive
    azimuth gaps are exactly 2*pi/n.
    """
    if not 4 <= n <= 12:
        raise ValueError(f"camera count {n} out of [4, 12]")
    phase = stream.uniform(0.0, 2.0 * math.pi)
    radius = stream.uniform(*RING_RADIUS_RANGE)
    height = stream.uniform(*RING_HEIGHT_RANGE)
    cx, _, cz = center
    cams = []
    for k in range(n):
        az = phase + 2.0 * math.pi * k / n
        pos = (cx + radius * math.sin(az), height, cz + radius * math.cos(az))
        cams.append(
            Camera(
                camera_id=f"cam{k:02d}",
                position=pos,
                look_at=tuple(center),
                vertical_fov=vertical_fov,
                image_size=tuple(image_size),
            )
        )
    return CameraRig(center=tuple(center), cameras=tuple(cams))


def project(camera: Camera, point) -> tuple[tuple[float, float], float] | None:
    """((pixel_x, pixel_y), depth) for a world point, None when behind."""
    right, up, fwd = camera.basis()
    d = np.asarray(point, dtype=float) - np.asarray(camera.position, dtype=float)
    z = float(d @ fwd)
    if z <= 0.0:
        return None
    x = float(d @ right)
    y = float(d @ up)
    f = camera.focal_px
    w, h = camera.image_size
    px = w / 2.0 + f * x / z
    py = h / 2.0 - f * y / z
    return (px, py), z


def unproject(camera: Camera, pixel, depth: float) -> np.ndarray:
    """World point for a (pixel, camera-space depth) pair."""
    right, up, fwd = camera.basis()
    f = camera.focal_px
    w, h = camera.image_size
    px, py = pixel
    d = right * ((px - w / 2.0) / f) - up * ((py - h / 2.0) / f) + fwd
    return np.asarray(camera.position, dtype=float) + depth * d


def camera_space_z(camera: Camera, point) -> float:
    """Depth of a world point along the camera view axis (may be <= 0)."""
    _, _, fwd = camera.basis()
    d = np.asarray(point, dtype=float) - np.asarray(camera.position, dtype=float)
    return float(d @ fwd)
