import dataclasses
import math

import numpy as np
import pytest

from conftest import make_settled_scene
from oracles import relation_oracle
from sceneforge.camera import Camera
from sceneforge.raster import rasterize_frame
from sceneforge.raster.buffers import FrameBuffers
from sceneforge.relations import (
    FRONT_BACK_DEADBAND,
    VISIBILITY_MIN_PIXELS,
    extract_relations,
    front_back,
    horizontally_aligned,
    left_right,
    visible_instances,
)
from sceneforge.sampler import advance_frame


def synthetic_buffers(mask: np.ndarray) -> FrameBuffers:
    h, w = mask.shape
    depth = np.where(mask > 0, 1.0, np.inf).astype(np.float32)
    return FrameBuffers(
        rgb=np.zeros((h, w, 3), dtype=np.float32),
        depth=depth,
        instance_mask=mask.astype(np.uint16),
        category_mask=mask.astype(np.uint16),
    )


def test_aligned_identical_bboxes():
    mask = np.zeros((64, 64), dtype=np.uint16)
    mask[10:20, 5:15] = 1
    mask[10:20, 40:50] = 2
    assert horizontally_aligned(synthetic_buffers(mask), 1, 2)


def test_not_aligned_disjoint_rows():
    mask = np.zeros((64, 64), dtype=np.uint16)
    mask[0:11, 5:15] = 1
    mask[50:61, 5:15] = 2
    assert not horizontally_aligned(synthetic_buffers(mask), 1, 2)


def test_aligned_exactly_at_threshold():
    # heights 10 and 10, overlap exactly 5 rows -> inclusive threshold
    mask = np.zeros((64, 64), dtype=np.uint16)
    mask[10:20, 5:15] = 1
    mask[15:25, 40:50] = 2
    assert horizontally_aligned(synthetic_buffers(mask), 1, 2)
    # one row less than threshold
    mask2 = np.zeros((64, 64), dtype=np.uint16)
    mask2[10:20, 5:15] = 1
    mask2[16:26, 40:50] = 2
    assert not horizontally_aligned(synthetic_buffers(mask2), 1, 2)


def test_absent_instance_raises():
    mask = np.zeros((8, 8), dtype=np.uint16)
    mask[2, 2] = 1
    with pytest.raises(ValueError, match="absent"):
        horizontally_aligned(synthetic_buffers(mask), 1, 9)
    with pytest.raises(ValueError, match="absent"):
        left_right(synthetic_buffers(mask), 9, 1)


def test_left_right_by_centroid():
    mask = np.zeros((32, 64), dtype=np.uint16)
    mask[10:20, 8:13] = 1  # centroid x = 10
    mask[10:20, 48:53] = 2  # centroid x = 50
    assert left_right(synthetic_buffers(mask), 1, 2) == (1, 2)
    assert left_right(synthetic_buffers(mask), 2, 1) == (1, 2)


def test_left_right_tie_not_applicable():
    mask = np.zeros((32, 32), dtype=np.uint16)
    mask[5:10, 10:20] = 1
    mask[20:25, 10:20] = 2  # same centroid x
    assert left_right(synthetic_buffers(mask), 1, 2) is None


def test_front_back_simple(catalog):
    scene = make_settled_scene(catalog, 90)
    frame = advance_frame(scene, 0)
    cam = Camera("c", (0.0, 1.0, -10.0), (0.0, 1.0, 0.0), math.pi / 3, (64, 64))
    # pick two objects with distinct z
    a, b = frame.objects[0].instance_id, frame.objects[1].instance_id
    za = frame.objects[0].position[2]
    zb = frame.objects[1].position[2]
    expected = None
    if abs(za - zb) >= FRONT_BACK_DEADBAND:
        expected = (a, b) if za < zb else (b, a)
    assert front_back(cam, frame, a, b) == expected


def test_front_back_dead_band(catalog):
    scene = make_settled_scene(catalog, 91)
    frame = advance_frame(scene, 0)
    objs = list(frame.objects[:2])
    moved = dataclasses.replace(
        objs[1],
        position=(objs[1].position[0], objs[1].position[1], objs[0].position[2] + 0.01),
    )
    scene.objects = (objs[0], moved) + tuple(scene.objects[2:])
    cam = Camera("c", (0.0, 1.0, -10.0), (0.0, 1.0, 0.0), math.pi / 3, (64, 64))
    assert front_back(cam, frame, objs[0].instance_id, moved.instance_id) is None


def test_extract_on_single_visible_object(catalog):
    scene = make_settled_scene(catalog, 92)
    frame = advance_frame(scene, 0)
    cam = scene.cameras.cameras[0]
    buffers = rasterize_frame(frame, cam)
    keep = visible_instances(frame, buffers)[:1]
    mask = np.where(np.isin(buffers.instance_mask, keep), buffers.instance_mask, 0)
    only_one = dataclasses.replace(buffers, instance_mask=mask.astype(np.uint16))
    assert len(extract_relations(frame, cam, only_one)) == 0


def test_relation_set_antisymmetry(catalog):
    for seed in range(93, 103):
        scene = make_settled_scene(catalog, seed)
        frame = advance_frame(scene, 0)
        cam = scene.cameras.cameras[0]
        rels = extract_relations(frame, cam, rasterize_frame(frame, cam)).as_set()
        for a, pred, b in rels:
            assert a != b
            inverse = {
                "left_of": "right_of",
                "right_of": "left_of",
                "in_front_of": "behind",
                "behind": "in_front_of",
            }[pred]
            assert (b, inverse, a) in rels


def test_visibility_threshold_enforced(catalog):
    for seed in range(104, 110):
        scene = make_settled_scene(catalog, seed)
        frame = advance_frame(scene, 0)
        cam = scene.cameras.cameras[0]
        buffers = rasterize_frame(frame, cam)
        rels = extract_relations(frame, cam, buffers)
        counts = {
            i: int((buffers.instance_mask == i).sum())
            for i in np.unique(buffers.instance_mask)
        }
        for a, _, b in rels.relations:
            assert counts.get(a, 0) >= VISIBILITY_MIN_PIXELS
            assert counts.get(b, 0) >= VISIBILITY_MIN_PIXELS


def test_extract_matches_oracle(catalog):
    for seed in range(110, 130):
        scene = make_settled_scene(catalog, seed)
        frame = advance_frame(scene, 0)
        cam = scene.cameras.cameras[seed % len(scene.cameras.cameras)]
        buffers = rasterize_frame(frame, cam)
        got = extract_relations(frame, cam, buffers).as_set()
        assert got == relation_oracle(frame, cam, buffers)


def test_mirrored_camera_swaps_left_right(catalog):
    for seed in range(130, 136):
        scene = make_settled_scene(catalog, seed)
        frame = advance_frame(scene, 0)
        cam = scene.cameras.cameras[0]

        # mirror the whole scene and the camera across the x=0 plane; the
        # mirrored render sees every left/right pair swapped
        def mirror_point(p):
            return (-p[0], p[1], p[2])

        m_objects = tuple(
            dataclasses.replace(o, position=mirror_point(o.position), yaw=-o.yaw)
            for o in scene.objects
        )
        m_scene = dataclasses.replace(scene, objects=m_objects, humans=())
        m_frame = advance_frame(m_scene, 0)
        frame = dataclasses.replace(frame, scene=scene, humans=())

        m_cam = Camera(
            cam.camera_id,
            mirror_point(cam.position),
            mirror_point(cam.look_at),
            cam.vertical_fov,
            cam.image_size,
        )
        rel = extract_relations(frame, cam, rasterize_frame(frame, cam)).as_set()
        m_rel = extract_relations(m_frame, m_cam, rasterize_frame(m_frame, m_cam)).as_set()

        def swap(rels):
            out = set()
            for a, pred, b in rels:
                pred = {"left_of": "right_of", "right_of": "left_of"}.get(pred, pred)
                out.add((a, pred, b))
            return out

        assert m_rel == swap(rel)


def test_three_aligned_objects_emit_twelve_relations(catalog):
    # three boxes in a row, mutually aligned and depth-separated: every pair
    # contributes both left/right and both front/behind sentences
    from sceneforge.config import GenerationConfig
    from sceneforge.rng import Stream, derive_seed
    from sceneforge.sampler import FrameState, PlacedObject, SceneInstance, sample_scene

    model = catalog.object_by_id("box_01")
    cfg = GenerationConfig(seed=0, frames_per_video=1)
    base = sample_scene(cfg, catalog, Stream(derive_seed(0, "video:0")))

    def cube(i, x, z):
        return PlacedObject(
            instance_id=i,
            model=model,
            material=catalog.default_material_for(model),
            color=catalog.color_by_id(model.default_color),
            scale=1.0,
            position=(x, 0.2, z),
            yaw=0.0,
        )

    scene = dataclasses.replace(
        base,
        objects=(cube(1, -0.8, 0.0), cube(2, 0.0, 0.4), cube(3, 0.8, 0.8)),
        humans=(),
    )
    frame = FrameState(scene=scene, frame_index=0, humans=())
    cam = Camera("c", (0.0, 0.6, -5.0), (0.0, 0.3, 0.0), math.pi / 3, (96, 96))
    rels = extract_relations(frame, cam, rasterize_frame(frame, cam))
    assert len(rels) == 12
    preds = [p for _, p, _ in rels.relations]
    assert preds.count("left_of") == 3 and preds.count("right_of") == 3
    assert preds.count("in_front_of") == 3 and preds.count("behind") == 3
