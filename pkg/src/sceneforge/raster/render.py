"""Frame rasterization: primitive packing, backend dispatch, shading.

Objects render as their yaw-rotated boxes, humans as their collider capsules.
Shading is flat Lambert of the instance tint (object color or clothing tint)
under one fixed directional light, plus a Blinn-Phong highlight scaled by a
per-material-family gloss constant. Backend selection: the FORGE_BACKEND
environment variable ("numba", "numpy", or "auto", the default) or
set_backend(); "auto" uses numba when importable.
"""

from __future__ import annotations

import os

import numpy as np

from ..camera import Camera
from ..geometry import rot_y
from ..sampler import FrameState
from .buffers import FrameBuffers

AMBIENT = 0.35
DIFFUSE = 0.65
SPEC_POWER = 24.0
_light = np.array([0.45, 0.8, 0.35])
LIGHT_DIR = _light / np.linalg.norm(_light)  # unit vector toward the light

FAMILY_GLOSS = {
    "metal": 0.60,
    "glass": 0.45,
    "ceramic": 0.30,
    "wood": 0.12,
    "cardboard": 0.04,
}
HUMAN_GLOSS = 0.05

BACKGROUND_RGB = {
    "indoor": (0.80, 0.78, 0.74),
    "outdoor": (0.62, 0.76, 0.92),
}

_backend_name: str | None = None


def set_backend(name: str) -> None:
    """Force the 'numba' or 'numpy' kernel (or 'auto' to re-resolve)."""
    global _backend_name
    if name not in ("numba", "numpy", "auto"):
        raise ValueError(f"unknown backend '{name}'")
    _backend_name = None if name == "auto" else name


def active_backend() -> str:
    global _backend_name
    if _backend_name is None:
        requested = os.environ.get("FORGE_BACKEND", "auto")
        if requested == "numpy":
            _backend_name = "numpy"
        elif requested == "numba":
            import sceneforge.raster.kernels_numba  # noqa: F401 - fail loudly

            _backend_name = "numba"
        else:
            try:
                import sceneforge.raster.kernels_numba  # noqa: F401

                _backend_name = "numba"
            except ImportError:
                _backend_name = "numpy"
    return _backend_name


def _render_fn():
    if active_backend() == "numba":
        from .kernels_numba import render
    else:
        from .kernels_numpy import render
    return render


def frame_category_ids(frame: FrameState) -> dict[str, int]:
    """Fallback label->id map derived from the frame alone."""
    labels = sorted({o.model.category_label for o in frame.objects} | {"person"})
    return {label: i + 1 for i, label in enumerate(labels)}


def pack_frame(frame: FrameState, category_ids: dict[str, int] | None = None):
    scene = frame.scene
    if category_ids is None:
        category_ids = frame_category_ids(frame)

    n_boxes = len(scene.objects)
    box_center = np.zeros((n_boxes, 3))
    box_half = np.zeros((n_boxes, 3))
    box_yaw = np.zeros(n_boxes)
    box_id = np.zeros(n_boxes, dtype=np.int64)
    for i, obj in enumerate(scene.objects):
        box_center[i] = obj.position
        box_half[i] = obj.half_extent
        box_yaw[i] = obj.yaw
        box_id[i] = obj.instance_id

    caps = []
    for state in frame.humans:
        hum = next(h for h in scene.humans if h.instance_id == state.instance_id)
        rot = rot_y(state.heading)
        pos = np.asarray(state.position)
        for part in hum.template.collider_parts:
            caps.append(
                (
                    rot @ np.asarray(part.p0) + pos,
                    rot @ np.asarray(part.p1) + pos,
                    part.radius,
                    state.instance_id,
                )
            )
    m = len(caps)
    cap_p0 = np.zeros((m, 3))
    cap_p1 = np.zeros((m, 3))
    cap_r = np.zeros(m)
    cap_id = np.zeros(m, dtype=np.int64)
    for i, (p0, p1, r, iid) in enumerate(caps):
        cap_p0[i] = p0
        cap_p1[i] = p1
        cap_r[i] = r
        cap_id[i] = iid

    max_id = max(
        [0]
        + [o.instance_id for o in scene.objects]
        + [s.instance_id for s in frame.humans]
    )
    tint = np.zeros((max_id + 1, 3))
    gloss = np.zeros(max_id + 1)
    category = np.zeros(max_id + 1, dtype=np.uint16)
    for obj in scene.objects:
        tint[obj.instance_id] = obj.color.rgb
        gloss[obj.instance_id] = FAMILY_GLOSS[obj.material.family]
        category[obj.instance_id] = category_ids[obj.model.category_label]
    for state in frame.humans:
        hum = next(h for h in scene.humans if h.instance_id == state.instance_id)
        tint[state.instance_id] = hum.clothing.tint
        gloss[state.instance_id] = HUMAN_GLOSS
        category[state.instance_id] = category_ids["person"]

    background = np.array(BACKGROUND_RGB[scene.env.kind])
    return (
        (box_center, box_half, box_yaw, box_id),
        (cap_p0, cap_p1, cap_r, cap_id),
        (tint, gloss, category, background),
    )


def shade(inst, normals, dirs, tint, gloss, background) -> np.ndarray:
    rgb = np.empty(inst.shape + (3,), dtype=np.float64)
    rgb[:] = background
    m = inst > 0
    if m.any():
        n = normals[m]
        d = dirs[m]
        v = -d / np.linalg.norm(d, axis=1, keepdims=True)
        ndotl = np.maximum(n @ LIGHT_DIR, 0.0)
        lam = AMBIENT + DIFFUSE * ndotl
        hvec = LIGHT_DIR + v
        hvec /= np.linalg.norm(hvec, axis=1, keepdims=True)
        ndoth = np.maximum(np.einsum("ij,ij->i", n, hvec), 0.0)
        spec = gloss[inst[m]] * ndoth**SPEC_POWER
        rgb[m] = tint[inst[m]] * lam[:, None] + spec[:, None]
    return np.clip(rgb, 0.0, 1.0)


def rasterize_frame(
    frame: FrameState,
    camera: Camera,
    category_ids: dict[str, int] | None = None,
) -> FrameBuffers:
    """Render one frame from one camera into RGB/depth/mask buffers."""
    w, h = camera.image_size
    right, up, fwd = camera.basis()
    boxes, capsules, (tint, gloss, category, background) = pack_frame(
        frame, category_ids
    )
    render = _render_fn()
    depth, inst, normals, dirs = render(
        w,
        h,
        np.asarray(camera.position, dtype=np.float64),
        right.astype(np.float64),
        up.astype(np.float64),
        fwd.astype(np.float64),
        float(camera.focal_px),
        *[np.ascontiguousarray(a) for a in boxes],
        *[np.ascontiguousarray(a) for a in capsules],
    )
    rgb = shade(inst, normals, dirs, tint, gloss, background)
    return FrameBuffers(
        rgb=rgb.astype(np.float32),
        depth=depth.astype(np.float32),
        instance_mask=inst.astype(np.uint16),
        category_mask=category[inst],
    )
