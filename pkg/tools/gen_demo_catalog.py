#!/usr/bin/env python3
"""Regenerate src/sceneforge/data/demo_catalog.json.

The demo catalog is small but exercises every asset kind: vowel-initial nouns
for article handling, all five material families, all three clothing sources,
indoor and outdoor environments, and motion clips with multiple action
segments. Trajectories are emitted at 30 fps with 4-decimal coordinates.
"""

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "sceneforge" / "data" / "demo_catalog.json"


def traj(points):
    return [[round(x, 4), round(z, 4), round(h, 4)] for x, z, h in points]


def walk_forward(n, speed=0.04):
    return traj((0.0, speed * f, 0.0) for f in range(n))


def walk_circle(n, radius=1.2):
    pts = []
    for f in range(n):
        theta = 2.0 * math.pi * f / n
        pts.append((radius * (1.0 - math.cos(theta)), radius * math.sin(theta), theta))
    return traj(pts)


def idle(n):
    return traj((0.0, 0.0, 0.0) for _ in range(n))


def pace(n, speed=0.04):
    half = n // 2
    pts = [(0.0, speed * f, 0.0) for f in range(half)]
    far = speed * (half - 1)
    pts += [(0.0, far - speed * (f - half + 1), math.pi) for f in range(half, n)]
    return traj(pts)


def human_template(gender, height):
    s = height / 1.8
    cap = lambda name, p0, p1, r: {
        "name": name,
        "p0": [round(v * s, 4) for v in p0],
        "p1": [round(v * s, 4) for v in p1],
        "radius": round(r * s, 4),
    }
    return {
        "gender": gender,
        "body_extent": [round(0.45 * s, 4), round(height, 4), round(0.28 * s, 4)],
        "collider_parts": [
            cap("torso", (0, 0.95, 0), (0, 1.45, 0), 0.16),
            cap("head", (0, 1.55, 0), (0, 1.67, 0), 0.11),
            cap("left_leg", (-0.10, 0.10, 0), (-0.10, 0.92, 0), 0.09),
            cap("right_leg", (0.10, 0.10, 0), (0.10, 0.92, 0), 0.09),
            cap("left_arm", (-0.24, 0.95, 0), (-0.26, 1.42, 0), 0.06),
            cap("right_arm", (0.24, 0.95, 0), (0.26, 1.42, 0), 0.06),
        ],
    }


def obj(id, noun, cat, extent, families, color):
    w, h, d = extent
    m = max(extent)
    size = "small" if m < 0.3 else ("medium" if m < 1.0 else "large")
    return {
        "id": id,
        "noun": noun,
        "category_label": cat,
        "size_class": size,
        "base_extent": [w, h, d],
        "allowed_material_families": families,
        "default_color": color,
    }


catalog = {
    "catalog_version": 1,
    "objects": [
        obj("chair_01", "chair", "folding chair", (0.45, 0.9, 0.5), ["wood", "metal"], "c_black"),
        obj("table_01", "table", "dining table", (1.4, 0.75, 0.8), ["wood", "metal"], "c_white"),
        obj("apple_01", "apple", "Granny Smith", (0.08, 0.08, 0.08), ["ceramic", "glass"], "c_green"),
        obj("vase_01", "vase", "vase", (0.18, 0.35, 0.18), ["ceramic", "glass"], "c_orange"),
        obj("sofa_01", "sofa", "studio couch", (1.7, 0.85, 0.9), ["wood"], "c_blue"),
        obj("lamp_01", "lamp", "table lamp", (0.3, 1.5, 0.3), ["metal", "ceramic"], "c_white"),
        obj("mug_01", "mug", "coffee mug", (0.12, 0.1, 0.09), ["ceramic", "glass", "metal"], "c_white"),
        obj("box_01", "box", "carton", (0.4, 0.4, 0.4), ["cardboard", "wood"], "c_yellow"),
        obj("ball_01", "ball", "soccer ball", (0.22, 0.22, 0.22), ["wood", "cardboard"], "c_red"),
        obj("bottle_01", "bottle", "water bottle", (0.09, 0.28, 0.09), ["glass", "metal"], "c_green"),
        obj("bookshelf_01", "bookshelf", "bookcase", (0.9, 1.8, 0.35), ["wood", "metal"], "c_white"),
        obj("armchair_01", "armchair", "rocking chair", (0.85, 1.0, 0.9), ["wood"], "c_purple"),
    ],
    "materials": [
        {"id": "m_steel", "family": "metal", "name": "steel"},
        {"id": "m_brass", "family": "metal", "name": "brass"},
        {"id": "m_cardboard", "family": "cardboard", "name": "cardboard"},
        {"id": "m_corrugated", "family": "cardboard", "name": "corrugated"},
        {"id": "m_wood", "family": "wood", "name": "wooden"},
        {"id": "m_oak", "family": "wood", "name": "oak"},
        {"id": "m_ceramic", "family": "ceramic", "name": "ceramic"},
        {"id": "m_porcelain", "family": "ceramic", "name": "porcelain"},
        {"id": "m_glass", "family": "glass", "name": "glass"},
        {"id": "m_crystal", "family": "glass", "name": "crystal"},
    ],
    "colors": [
        {"id": "c_red", "name": "red", "rgb": [0.84, 0.15, 0.16]},
        {"id": "c_blue", "name": "blue", "rgb": [0.17, 0.35, 0.75]},
        {"id": "c_green", "name": "green", "rgb": [0.2, 0.62, 0.24]},
        {"id": "c_yellow", "name": "yellow", "rgb": [0.92, 0.82, 0.18]},
        {"id": "c_orange", "name": "orange", "rgb": [0.95, 0.55, 0.12]},
        {"id": "c_purple", "name": "purple", "rgb": [0.55, 0.27, 0.68]},
        {"id": "c_white", "name": "white", "rgb": [0.93, 0.93, 0.9]},
        {"id": "c_black", "name": "black", "rgb": [0.08, 0.08, 0.09]},
    ],
    "human_templates": [
        human_template("male", 1.80),
        human_template("female", 1.68),
        human_template("neutral", 1.74),
    ],
    "clothing_textures": [
        {
            "id": "ct_plain_blue",
            "source": "plain_color",
            "description_sentences": [],
            "tint": [0.25, 0.35, 0.7],
        },
        {
            "id": "ct_plain_gray",
            "source": "plain_color",
            "description_sentences": [],
            "tint": [0.5, 0.5, 0.52],
        },
        {
            "id": "ct_sur_track",
            "source": "surreal",
            "description_sentences": ["wears a green tracksuit"],
            "tint": [0.22, 0.5, 0.3],
        },
        {
            "id": "ct_sur_stripes",
            "source": "surreal",
            "description_sentences": ["wears a striped sweater"],
            "tint": [0.65, 0.6, 0.35],
        },
        {
            "id": "ct_mg_denim",
            "source": "multigarment",
            "description_sentences": [
                "wears a denim jacket and black jeans",
                "has short brown hair",
            ],
            "tint": [0.3, 0.38, 0.55],
        },
        {
            "id": "ct_mg_plaid",
            "source": "multigarment",
            "description_sentences": [
                "wears a red plaid shirt",
                "wears khaki trousers",
                "has a trimmed beard",
            ],
            "tint": [0.6, 0.3, 0.28],
        },
    ],
    "motion_clips": [
        {
            "id": "clip_walk_fwd",
            "fps": 30.0,
            "n_frames": 120,
            "action_segments": [{"start": 0, "end": 120, "phrase": "walks forward"}],
            "root_trajectory": walk_forward(120),
        },
        {
            "id": "clip_walk_circle",
            "fps": 30.0,
            "n_frames": 180,
            "action_segments": [{"start": 0, "end": 180, "phrase": "walks in a circle"}],
            "root_trajectory": walk_circle(180),
        },
        {
            "id": "clip_idle_wave",
            "fps": 30.0,
            "n_frames": 150,
            "action_segments": [
                {"start": 0, "end": 75, "phrase": "stands still"},
                {"start": 75, "end": 150, "phrase": "waves"},
            ],
            "root_trajectory": idle(150),
        },
        {
            "id": "clip_pace",
            "fps": 30.0,
            "n_frames": 160,
            "action_segments": [
                {"start": 0, "end": 80, "phrase": "walks forward"},
                {"start": 80, "end": 160, "phrase": "walks back"},
            ],
            "root_trajectory": pace(160),
        },
    ],
    "scene_envs": [
        {
            "id": "env_living_room",
            "kind": "indoor",
            "description": "modern living room with wooden floors",
            "floor_extent": [-5.0, -5.0, 5.0, 5.0],
            "spawn_region": [-3.0, -3.0, 3.0, 3.0],
        },
        {
            "id": "env_office",
            "kind": "indoor",
            "description": "sunlit office with large windows",
            "floor_extent": [-4.0, -4.0, 4.0, 4.0],
            "spawn_region": [-3.0, -3.0, 3.0, 3.0],
        },
        {
            "id": "env_park",
            "kind": "outdoor",
            "description": "grassy park with scattered trees",
            "floor_extent": [-8.0, -8.0, 8.0, 8.0],
            "spawn_region": [-4.0, -4.0, 4.0, 4.0],
        },
    ],
}

OUT.parent.mkdir(parents=True, exist_ok=True)
OUT.write_text(json.dumps(catalog, indent=1) + "\n")
print(f"wrote {OUT} ({OUT.stat().st_size} bytes)")
