"""Numba-jitted rasterization kernel (default backend).

Scalar mirror of kernels_numpy: identical formulas, epsilons, update rule
(strict less-than, primitives in ascending id order), so the two backends
produce the same buffers. Kernels are cached to disk after first compile.
"""

from __future__ import annotations

import numpy as np
from numba import njit

RAY_EPS = 1e-6
_PAR_EPS = 1e-12


@njit(cache=True, fastmath=False)
def _screen_bounds(lo, hi, w, h, cam_pos, right, up, fwd, focal, out):
    """Fill out[:4] with (x0, x1, y0, y1); return False when offscreen."""
    min_px = 1e30
    max_px = -1e30
    min_py = 1e30
    max_py = -1e30
    n_behind = 0
    for i in range(8):
        cx = lo[0] if (i & 1) == 0 else hi[0]
        cy = lo[1] if (i & 2) == 0 else hi[1]
        cz = lo[2] if (i & 4) == 0 else hi[2]
        dx = cx - cam_pos[0]
        dy = cy - cam_pos[1]
        dz = cz - cam_pos[2]
        z = dx * fwd[0] + dy * fwd[1] + dz * fwd[2]
        if z < 1e-6:
            n_behind += 1
            continue
        x = dx * right[0] + dy * right[1] + dz * right[2]
        y = dx * up[0] + dy * up[1] + dz * up[2]
        px = w * 0.5 + focal * x / z
        py = h * 0.5 - focal * y / z
        min_px = min(min_px, px)
        max_px = max(max_px, px)
        min_py = min(min_py, py)
        max_py = max(max_py, py)
    if n_behind == 8:
        return False
    if n_behind > 0:
        out[0], out[1], out[2], out[3] = 0, w, 0, h
        return True
    x0 = max(int(np.floor(min_px)) - 1, 0)
    x1 = min(int(np.ceil(max_px)) + 1, w)
    y0 = max(int(np.floor(min_py)) - 1, 0)
    y1 = min(int(np.ceil(max_py)) + 1, h)
    if x0 >= x1 or y0 >= y1:
        return False
    out[0], out[1], out[2], out[3] = x0, x1, y0, y1
    return True


@njit(cache=True, fastmath=False)
def _ray_box(ox, oy, oz, dx, dy, dz, hx, hy, hz):
    """(t, axis, use_near) for a ray vs an axis-aligned box at the origin."""
    t_near = -np.inf
    t_far = np.inf
    near_axis = 0
    far_axis = 0
    for a in range(3):
        if a == 0:
            da, oa, ha = dx, ox, hx
        elif a == 1:
            da, oa, ha = dy, oy, hy
        else:
            da, oa, ha = dz, oz, hz
        if abs(da) < _PAR_EPS:
            if abs(oa) <= ha:
                tmin_a, tmax_a = -np.inf, np.inf
            else:
                tmin_a, tmax_a = np.inf, -np.inf
        else:
            t1 = (-ha - oa) / da
            t2 = (ha - oa) / da
            if t1 < t2:
                tmin_a, tmax_a = t1, t2
            else:
                tmin_a, tmax_a = t2, t1
        if tmin_a > t_near:
            t_near = tmin_a
            near_axis = a
        if tmax_a < t_far:
            t_far = tmax_a
            far_axis = a
    if t_far < t_near:
        return np.inf, 0, True
    if t_near > RAY_EPS:
        return t_near, near_axis, True
    if t_far > RAY_EPS:
        return t_far, far_axis, False
    return np.inf, 0, True


@njit(cache=True, fastmath=False)
def _ray_capsule(
    ox, oy, oz, dx, dy, dz, p0, p1, r, baba, baoa, oaoa, obob
):
    """Smallest t > RAY_EPS where the ray crosses the capsule surface."""
    bax = p1[0] - p0[0]
    bay = p1[1] - p0[1]
    baz = p1[2] - p0[2]
    dd = dx * dx + dy * dy + dz * dz
    bard = dx * bax + dy * bay + dz * baz
    rdoa = dx * ox + dy * oy + dz * oz  # ox.. is cam - p0
    obx = ox - bax
    oby = oy - bay
    obz = oz - baz
    rdob = dx * obx + dy * oby + dz * obz

    t_best = np.inf

    A = baba * dd - bard * bard
    B = baba * rdoa - baoa * bard
    C = baba * oaoa - baoa * baoa - r * r * baba
    disc = B * B - A * C
    if A > _PAR_EPS and disc >= 0.0:
        sq = np.sqrt(disc)
        for sgn in (-1.0, 1.0):
            tc = (-B + sgn * sq) / A
            if tc > RAY_EPS and tc < t_best:
                y = baoa + tc * bard
                if 0.0 <= y <= baba:
                    t_best = tc

    # caps: sphere at p0 keeps hits with y < 0, sphere at p1 keeps y > baba
    for cap in range(2):
        if cap == 0:
            b = rdoa
            cterm = oaoa - r * r
        else:
            b = rdob
            cterm = obob - r * r
        disc2 = b * b - dd * cterm
        if disc2 < 0.0:
            continue
        sq2 = np.sqrt(disc2)
        for sgn in (-1.0, 1.0):
            ts = (-b + sgn * sq2) / dd
            if ts > RAY_EPS and ts < t_best:
                y = baoa + ts * bard
                if (cap == 0 and y < 0.0) or (cap == 1 and y > baba):
                    t_best = ts
    return t_best


@njit(cache=True, fastmath=False)
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
    dirs = np.empty((h, w, 3), dtype=np.float64)
    for j in range(h):
        sy = -(j + 0.5 - h * 0.5) / focal
        for i in range(w):
            sx = (i + 0.5 - w * 0.5) / focal
            for a in range(3):
                dirs[j, i, a] = sx * right[a] + sy * up[a] + fwd[a]

    bounds = np.empty(4, dtype=np.int64)
    lo = np.empty(3, dtype=np.float64)
    hi = np.empty(3, dtype=np.float64)

    for k in range(box_center.shape[0]):
        cx, cy, cz = box_center[k, 0], box_center[k, 1], box_center[k, 2]
        hx, hy, hz = box_half[k, 0], box_half[k, 1], box_half[k, 2]
        yaw = box_yaw[k]
        c = np.cos(yaw)
        s = np.sin(yaw)
        ex = hx * abs(c) + hz * abs(s)
        ez = hx * abs(s) + hz * abs(c)
        lo[0], lo[1], lo[2] = cx - ex, cy - hy, cz - ez
        hi[0], hi[1], hi[2] = cx + ex, cy + hy, cz + ez
        if not _screen_bounds(lo, hi, w, h, cam_pos, right, up, fwd, focal, bounds):
            continue
        x0, x1, y0, y1 = bounds[0], bounds[1], bounds[2], bounds[3]

        ox = cam_pos[0] - cx
        oy = cam_pos[1] - cy
        oz = cam_pos[2] - cz
        olx = c * ox - s * oz
        oly = oy
        olz = s * ox + c * oz
        for j in range(y0, y1):
            for i in range(x0, x1):
                dx0 = dirs[j, i, 0]
                dy0 = dirs[j, i, 1]
                dz0 = dirs[j, i, 2]
                dlx = c * dx0 - s * dz0
                dly = dy0
                dlz = s * dx0 + c * dz0
                t, axis, use_near = _ray_box(olx, oly, olz, dlx, dly, dlz, hx, hy, hz)
                if t < depth[j, i]:
                    depth[j, i] = t
                    inst[j, i] = box_id[k]
                    if axis == 0:
                        d_axis = dlx
                    elif axis == 1:
                        d_axis = dly
                    else:
                        d_axis = dlz
                    sign = -1.0 if d_axis > 0.0 else (1.0 if d_axis < 0.0 else 0.0)
                    if not use_near:
                        sign = -sign
                    nlx = sign if axis == 0 else 0.0
                    nly = sign if axis == 1 else 0.0
                    nlz = sign if axis == 2 else 0.0
                    normals[j, i, 0] = c * nlx + s * nlz
                    normals[j, i, 1] = nly
                    normals[j, i, 2] = -s * nlx + c * nlz

    for k in range(cap_p0.shape[0]):
        p0 = cap_p0[k]
        p1 = cap_p1[k]
        r = cap_r[k]
        for a in range(3):
            lo[a] = min(p0[a], p1[a]) - r
            hi[a] = max(p0[a], p1[a]) + r
        if not _screen_bounds(lo, hi, w, h, cam_pos, right, up, fwd, focal, bounds):
            continue
        x0, x1, y0, y1 = bounds[0], bounds[1], bounds[2], bounds[3]

        bax = p1[0] - p0[0]
        bay = p1[1] - p0[1]
        baz = p1[2] - p0[2]
        oax = cam_pos[0] - p0[0]
        oay = cam_pos[1] - p0[1]
        oaz = cam_pos[2] - p0[2]
        obx = cam_pos[0] - p1[0]
        oby = cam_pos[1] - p1[1]
        obz = cam_pos[2] - p1[2]
        baba = bax * bax + bay * bay + baz * baz
        baoa = bax * oax + bay * oay + baz * oaz
        oaoa = oax * oax + oay * oay + oaz * oaz
        obob = obx * obx + oby * oby + obz * obz
        for j in range(y0, y1):
            for i in range(x0, x1):
                dx0 = dirs[j, i, 0]
                dy0 = dirs[j, i, 1]
                dz0 = dirs[j, i, 2]
                t = _ray_capsule(
                    oax, oay, oaz, dx0, dy0, dz0, p0, p1, r, baba, baoa, oaoa, obob
                )
                if t < depth[j, i]:
                    depth[j, i] = t
                    inst[j, i] = cap_id[k]
                    hx_ = cam_pos[0] + t * dx0
                    hy_ = cam_pos[1] + t * dy0
                    hz_ = cam_pos[2] + t * dz0
                    yh = (hx_ - p0[0]) * bax + (hy_ - p0[1]) * bay + (hz_ - p0[2]) * baz
                    frac = yh / max(baba, _PAR_EPS)
                    frac = min(max(frac, 0.0), 1.0)
                    sx_ = p0[0] + frac * bax
                    sy_ = p0[1] + frac * bay
                    sz_ = p0[2] + frac * baz
                    normals[j, i, 0] = (hx_ - sx_) / r
                    normals[j, i, 1] = (hy_ - sy_) / r
                    normals[j, i, 2] = (hz_ - sz_) / r

    return depth, inst, normals, dirs
