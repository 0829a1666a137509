"""Shared geometry helpers: y-up world, floor at y=0, yaw about +y.

Yaw convention: ``rot_y(yaw)`` maps local +z to ``(sin(yaw), 0, cos(yaw))``,
i.e. yaw is the azimuth measured from +z toward +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def rot_y(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned box given by min/max corners."""

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    def overlaps(self, other: "Aabb") -> bool:
        """Strict interior overlap; shared faces do not count."""
        return all(self.lo[a] < other.hi[a] and other.lo[a] < self.hi[a] for a in range(3))

    def inflate_xz(self, r: float) -> "Aabb":
        lo = (self.lo[0] - r, self.lo[1], self.lo[2] - r)
        hi = (self.hi[0] + r, self.hi[1], self.hi[2] + r)
        return Aabb(lo, hi)

    def contains_xz(self, x: float, z: float) -> bool:
        return self.lo[0] <= x <= self.hi[0] and self.lo[2] <= z <= self.hi[2]


def yaw_box_aabb(center, half_extent, yaw: float) -> Aabb:
    """World AABB of a yaw-rotated box (half extents in local axes)."""
    hx, hy, hz = half_extent
    c, s = abs(math.cos(yaw)), abs(math.sin(yaw))
    ex = hx * c + hz * s
    ez = hx * s + hz * c
    cx, cy, cz = center
    return Aabb((cx - ex, cy - hy, cz - ez), (cx + ex, cy + hy, cz + ez))


def segment_aabb_entry(p0, p1, box: Aabb) -> float | None:
    """Parameter t in [0,1] where segment p0->p1 first enters ``box``.

    Returns 0.0 if p0 already lies inside, None if the segment misses.
    Only x and z are swept (the walker stays on the floor); the box must
    overlap the segment's y range, which callers check beforehand.
    """
    t_in, t_out = 0.0, 1.0
    for axis in (0, 2):
        d = p1[axis] - p0[axis]
        lo = box.lo[axis] - p0[axis]
        hi = box.hi[axis] - p0[axis]
        if abs(d) < 1e-12:
            if lo > 0.0 or hi < 0.0:
                return None
            continue
        t0, t1 = lo / d, hi / d
        if t0 > t1:
            t0, t1 = t1, t0
        t_in = max(t_in, t0)
        t_out = min(t_out, t1)
        if t_in > t_out:
            return None
    return t_in


@dataclass(frozen=True)
class Rect:
    """Ground-plane rectangle (x_min, z_min, x_max, z_max)."""

    x0: float
    z0: float
    x1: float
    z1: float

    @classmethod
    def of(cls, bounds) -> "Rect":
        return cls(*bounds)

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.z0 + self.z1))

    def inset(self, dx: float, dz: float) -> "Rect | None":
        """Shrink by (dx, dz) per side; None when nothing remains."""
        r = Rect(self.x0 + dx, self.z0 + dz, self.x1 - dx, self.z1 - dz)
        if r.x0 > r.x1 or r.z0 > r.z1:
            return None
        return r

    def contains(self, x: float, z: float) -> bool:
        return self.x0 <= x <= self.x1 and self.z0 <= z <= self.z1

    def contains_rect(self, other: "Rect") -> bool:
        return (
            other.x0 >= self.x0 and other.z0 >= self.z0
            and other.x1 <= self.x1 and other.z1 <= self.z1
        )
