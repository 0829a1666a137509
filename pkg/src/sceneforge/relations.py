"""Pairwise spatial relations from segmentation pixels and camera depth.

Left/right comes from mask centroid x of instances that are horizontally
aligned (vertical pixel-bbox overlap of at least half the smaller bbox
height). Front/behind compares camera-space z of the instance centers with a
0.05 m dead band. Instances participate only when they cover at least
VISIBILITY_MIN_PIXELS mask pixels. Every applicable pair emits both
directions of each axis, so the relation set is antisymmetric by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .camera import Camera, camera_space_z
from .raster.buffers import Coverage, FrameBuffers, pixel_coverage
from .sampler import FrameState

VISIBILITY_MIN_PIXELS = 25
FRONT_BACK_DEADBAND = 0.05  # meters of camera-space z
ALIGN_OVERLAP_FRACTION = 0.5

LEFT_OF = "left_of"
RIGHT_OF = "right_of"
IN_FRONT_OF = "in_front_of"
BEHIND = "behind"
PREDICATES = (LEFT_OF, RIGHT_OF, IN_FRONT_OF, BEHIND)

Relation = tuple[int, str, int]  # (subject, predicate, object)


@dataclass(frozen=True)
class RelationSet:
    relations: tuple[Relation, ...]

    def __contains__(self, rel: Relation) -> bool:
        return rel in set(self.relations)

    def as_set(self) -> set[Relation]:
        return set(self.relations)

    def __len__(self) -> int:
        return len(self.relations)


def _coverage_or_raise(buffers: FrameBuffers, instance_id: int) -> Coverage:
    cov = pixel_coverage(buffers, instance_id)
    if cov.count == 0:
        raise ValueError(f"instance {instance_id} is absent from the mask")
    return cov


def horizontally_aligned(buffers: FrameBuffers, a: int, b: int) -> bool:
    """True when the vertical bbox overlap reaches half the smaller height."""
    ca = _coverage_or_raise(buffers, a)
    cb = _coverage_or_raise(buffers, b)
    _, ay0, _, ay1 = ca.bbox
    _, by0, _, by1 = cb.bbox
    overlap = min(ay1, by1) - max(ay0, by0) + 1
    min_height = min(ay1 - ay0 + 1, by1 - by0 + 1)
    return overlap >= ALIGN_OVERLAP_FRACTION * min_height


def left_right(buffers: FrameBuffers, a: int, b: int) -> tuple[int, int] | None:
    """(left id, right id) by mask centroid x; None on an exact tie."""
    ca = _coverage_or_raise(buffers, a)
    cb = _coverage_or_raise(buffers, b)
    xa, xb = ca.centroid[0], cb.centroid[0]
    if xa == xb:
        return None
    return (a, b) if xa < xb else (b, a)


def instance_center(frame: FrameState, instance_id: int) -> tuple[float, float, float]:
    """World-space center of an instance's collision volume."""
    for obj in frame.objects:
        if obj.instance_id == instance_id:
            return obj.position
    for state in frame.humans:
        if state.instance_id == instance_id:
            hum = next(
                h for h in frame.scene.humans if h.instance_id == instance_id
            )
            x, _, z = state.position
            return (x, hum.height / 2.0, z)
    raise ValueError(f"instance {instance_id} not in frame")


def front_back(
    camera: Camera, frame: FrameState, a: int, b: int
) -> tuple[int, int] | None:
    """(front id, back id) by camera-space z; None inside the dead band."""
    za = camera_space_z(camera, instance_center(frame, a))
    zb = camera_space_z(camera, instance_center(frame, b))
    if abs(za - zb) < FRONT_BACK_DEADBAND:
        return None
    return (a, b) if za < zb else (b, a)


def visible_instances(frame: FrameState, buffers: FrameBuffers) -> list[int]:
    """Frame instance ids with at least VISIBILITY_MIN_PIXELS mask pixels."""
    ids = [o.instance_id for o in frame.objects] + [
        s.instance_id for s in frame.humans
    ]
    return [
        i
        for i in sorted(ids)
        if pixel_coverage(buffers, i).count >= VISIBILITY_MIN_PIXELS
    ]


def extract_relations(
    frame: FrameState, camera: Camera, buffers: FrameBuffers
) -> RelationSet:
    """All applicable relations over visible unordered instance pairs."""
    visible = visible_instances(frame, buffers)
    rels: list[Relation] = []
    for ai in range(len(visible)):
        for bi in range(ai + 1, len(visible)):
            a, b = visible[ai], visible[bi]
            if horizontally_aligned(buffers, a, b):
                lr = left_right(buffers, a, b)
                if lr is not None:
                    left, right = lr
                    rels.append((left, LEFT_OF, right))
                    rels.append((right, RIGHT_OF, left))
            fb = front_back(camera, frame, a, b)
            if fb is not None:
                front, back = fb
                rels.append((front, IN_FRONT_OF, back))
                rels.append((back, BEHIND, front))
    return RelationSet(relations=tuple(rels))
