"""Pure-numpy rasterization kernel (fallback backend).

Semantics shared with the numba backend: per pixel, cast a ray through the
pixel center with direction scaled so the ray parameter t equals camera-space
depth, and keep the smallest t > RAY_EPS over all primitives. Ties in depth
keep the earlier (lower-id) primitive because updates use strict less-than
and primitives are processed in ascending instance-id order.
"""

from __future__ import annotations

import numpy as np

RAY_EPS = 1e-6
_PAR_EPS = 1e-12


def render(
    w,
    h,
    cam_pos,
    right,
    up,
    fwd,
    focal,
    box_center,
    box_half,
    box_yaw,
    box_id,
    cap_p0,
    cap_p1,
    cap_r,
    cap_id,
):
    depth = np.full((h, w), np.inf, dtype=np.float64)
    inst = np.zeros((h, w), dtype=np.int64)
    normals = np.zeros((h, w, 3), dtype=np.float64)

    sx = (np.arange(w) + 0.5 - w * 0.5) / focal
    sy = -(np.arange(h) + 0.5 - h * 0.5) / focal
    dirs = (
        sx[None, :, None] * right[None, None, :]
        + sy[:, None, None] * up[None, None, :]
        + fwd[None, None, :]
    )

    for k in range(box_center.shape[0]):
        lo, hi = _box_aabb(box_center[k], box_half[k], box_yaw[k])
        bounds = _screen_bounds(lo, hi, w, h, cam_pos, right, up, fwd, focal)
        if bounds is None:
            continue
        x0, x1, y0, y1 = bounds
        sub = dirs[y0:y1, x0:x1]
        t, nrm = _ray_box_grid(cam_pos, sub, box_center[k], box_half[k], box_yaw[k])
        _commit(depth, inst, normals, x0, x1, y0, y1, t, nrm, box_id[k])

    for k in range(cap_p0.shape[0]):
        lo = np.minimum(cap_p0[k], cap_p1[k]) - cap_r[k]
        hi = np.maximum(cap_p0[k], cap_p1[k]) + cap_r[k]
        bounds = _screen_bounds(lo, hi, w, h, cam_pos, right, up, fwd, focal)
        if bounds is None:
            continue
        x0, x1, y0, y1 = bounds
        sub = dirs[y0:y1, x0:x1]
        t, nrm = _ray_capsule_grid(cam_pos, sub, cap_p0[k], cap_p1[k], cap_r[k])
        _commit(depth, inst, normals, x0, x1, y0, y1, t, nrm, cap_id[k])

    return depth, inst, normals, dirs


def _commit(depth, inst, normals, x0, x1, y0, y1, t, nrm, prim_id):
    view = depth[y0:y1, x0:x1]
    closer = t < view
    if not closer.any():
        return
    view[closer] = t[closer]
    inst[y0:y1, x0:x1][closer] = prim_id
    normals[y0:y1, x0:x1][closer] = nrm[closer]


def _box_aabb(center, half, yaw):
    c, s = abs(np.cos(yaw)), abs(np.sin(yaw))
    ex = half[0] * c + half[2] * s
    ez = half[0] * s + half[2] * c
    ext = np.array([ex, half[1], ez])
    return center - ext, center + ext


def _screen_bounds(lo, hi, w, h, cam_pos, right, up, fwd, focal):
    """Clamped pixel rect covering the world AABB, or None when offscreen."""
    corners = np.empty((8, 3))
    for i in range(8):
        corners[i, 0] = lo[0] if (i & 1) == 0 else hi[0]
        corners[i, 1] = lo[1] if (i & 2) == 0 else hi[1]
        corners[i, 2] = lo[2] if (i & 4) == 0 else hi[2]
    d = corners - cam_pos
    z = d @ fwd
    behind = z < 1e-6
    if behind.all():
        return None
    if behind.any():
        return 0, w, 0, h  # straddles the camera plane: be conservative
    px = w * 0.5 + focal * (d @ right) / z
    py = h * 0.5 - focal * (d @ up) / z
    x0 = max(int(np.floor(px.min())) - 1, 0)
    x1 = min(int(np.ceil(px.max())) + 1, w)
    y0 = max(int(np.floor(py.min())) - 1, 0)
    y1 = min(int(np.ceil(py.max())) + 1, h)
    if x0 >= x1 or y0 >= y1:
        return None
    return x0, x1, y0, y1


def _ray_box_grid(cam_pos, dirs, center, half, yaw):
    c, s = np.cos(yaw), np.sin(yaw)
    o = cam_pos - center
    # rotate into the box frame (inverse yaw)
    ol = np.array([c * o[0] - s * o[2], o[1], s * o[0] + c * o[2]])
    dl = np.empty_like(dirs)
    dl[..., 0] = c * dirs[..., 0] - s * dirs[..., 2]
    dl[..., 1] = dirs[..., 1]
    dl[..., 2] = s * dirs[..., 0] + c * dirs[..., 2]

    t_near = np.full(dirs.shape[:2], -np.inf)
    t_far = np.full(dirs.shape[:2], np.inf)
    near_axis = np.zeros(dirs.shape[:2], dtype=np.int64)
    far_axis = np.zeros(dirs.shape[:2], dtype=np.int64)
    for a in range(3):
        da = dl[..., a]
        parallel = np.abs(da) < _PAR_EPS
        safe = np.where(parallel, 1.0, da)
        t1 = (-half[a] - ol[a]) / safe
        t2 = (half[a] - ol[a]) / safe
        tmin_a = np.minimum(t1, t2)
        tmax_a = np.maximum(t1, t2)
        inside = abs(ol[a]) <= half[a]
        tmin_a = np.where(parallel, -np.inf if inside else np.inf, tmin_a)
        tmax_a = np.where(parallel, np.inf if inside else -np.inf, tmax_a)
        upd = tmin_a > t_near
        near_axis = np.where(upd, a, near_axis)
        t_near = np.where(upd, tmin_a, t_near)
        upd = tmax_a < t_far
        far_axis = np.where(upd, a, far_axis)
        t_far = np.where(upd, tmax_a, t_far)

    hit = t_far >= t_near
    use_near = t_near > RAY_EPS
    t = np.where(use_near, t_near, t_far)
    hit &= t > RAY_EPS
    t = np.where(hit, t, np.inf)

    nrm = np.zeros(dirs.shape[:2] + (3,))
    axis = np.where(use_near, near_axis, far_axis)
    d_axis = np.take_along_axis(dl, axis[..., None], axis=2)[..., 0]
    sign = np.where(use_near, -np.sign(d_axis), np.sign(d_axis))
    local = np.zeros_like(nrm)
    np.put_along_axis(local, axis[..., None], sign[..., None], axis=2)
    # rotate the local normal back to world
    nrm[..., 0] = c * local[..., 0] + s * local[..., 2]
    nrm[..., 1] = local[..., 1]
    nrm[..., 2] = -s * local[..., 0] + c * local[..., 2]
    nrm[~hit] = 0.0
    return t, nrm


def _ray_capsule_grid(cam_pos, dirs, p0, p1, r):
    ba = p1 - p0
    oa = cam_pos - p0
    ob = cam_pos - p1
    baba = float(ba @ ba)
    baoa = float(ba @ oa)
    oaoa = float(oa @ oa)
    obob = float(ob @ ob)

    dd = np.einsum("...i,...i->...", dirs, dirs)
    bard = dirs @ ba
    rdoa = dirs @ oa
    rdob = dirs @ ob

    t = np.full(dirs.shape[:2], np.inf)

    # cylinder body
    A = baba * dd - bard * bard
    B = baba * rdoa - baoa * bard
    C = baba * oaoa - baoa * baoa - r * r * baba
    disc = B * B - A * C
    okA = A > _PAR_EPS
    sq = np.sqrt(np.where(disc >= 0.0, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        for tc in ((-B - sq) / np.where(okA, A, 1.0), (-B + sq) / np.where(okA, A, 1.0)):
            y = baoa + tc * bard
            valid = okA & (disc >= 0.0) & (tc > RAY_EPS) & (y >= 0.0) & (y <= baba)
            t = np.where(valid & (tc < t), tc, t)

    # spherical caps
    for oc_sq, rdoc, ref in ((oaoa, rdoa, 0.0), (obob, rdob, 1.0)):
        b = rdoc
        cterm = oc_sq - r * r
        disc2 = b * b - dd * cterm
        sq2 = np.sqrt(np.where(disc2 >= 0.0, disc2, 0.0))
        for ts in ((-b - sq2) / dd, (-b + sq2) / dd):
            y = baoa + ts * bard  # ba . (hit - p0)
            outside = (y < 0.0) if ref == 0.0 else (y > baba)
            valid = (disc2 >= 0.0) & (ts > RAY_EPS) & outside
            t = np.where(valid & (ts < t), ts, t)

    hit = np.isfinite(t)
    tt = np.where(hit, t, 0.0)
    hitp = cam_pos + dirs * tt[..., None]
    yh = (hitp - p0) @ ba
    frac = np.clip(np.where(baba > 0, yh / max(baba, _PAR_EPS), 0.0), 0.0, 1.0)
    seg = p0 + frac[..., None] * ba
    nrm = (hitp - seg) / r
    nrm[~hit] = 0.0
    return t, nrm
