"""Generation configuration: sampling ranges and ablation toggles.

Counts follow the sampling envelope the engine supports: 1-8 objects, 0-4
humans, 4-12 cameras per scene, 4 rendered viewpoints per frame. The
randomize_* switches, physics_enabled, multi_human_enabled, and
clothing_source are the ablation toggles; turning one off must leave every
other sampled quantity untouched (each aspect draws from its own keyed
substream, see rng.py).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .catalog import CLOTHING_SOURCES

OBJECT_BOUNDS = (1, 8)
HUMAN_BOUNDS = (0, 4)
CAMERA_BOUNDS = (4, 12)
SIZE_SCALE_RANGE = (0.7, 1.3)

CAPTION_MODES = ("full", "sampled")

DEFAULT_STATEMENT_WEIGHTS = {
    "prefix_enumeration": 1.0,
    "scene": 1.0,
    "relation": 0.5,
    "action": 1.0,
    "clothing": 0.7,
}


class ConfigError(Exception):
    pass


@dataclass
class GenerationConfig:
    seed: int = 0
    n_object_range: tuple[int, int] = OBJECT_BOUNDS
    n_human_range: tuple[int, int] = HUMAN_BOUNDS
    n_camera_range: tuple[int, int] = CAMERA_BOUNDS
    viewpoints_per_frame: int = 4
    frames_per_video: int = 1500
    n_videos: int = 1
    randomize_color: bool = True
    randomize_size: bool = True
    randomize_material: bool = True
    physics_enabled: bool = True
    multi_human_enabled: bool = True
    clothing_source: str = "multigarment"
    caption_mode: str = "full"
    statement_weights: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_STATEMENT_WEIGHTS)
    )
    max_place_attempts: int = 64
    image_size: tuple[int, int] = (128, 128)

    def __post_init__(self):
        self.n_object_range = _as_range(self.n_object_range, "n_object_range", OBJECT_BOUNDS)
        self.n_human_range = _as_range(self.n_human_range, "n_human_range", HUMAN_BOUNDS)
        self.n_camera_range = _as_range(self.n_camera_range, "n_camera_range", CAMERA_BOUNDS)
        if self.viewpoints_per_frame < 1:
            raise ConfigError("viewpoints_per_frame must be >= 1")
        if self.viewpoints_per_frame > self.n_camera_range[0]:
            raise ConfigError(
                f"viewpoints_per_frame {self.viewpoints_per_frame} exceeds the "
                f"guaranteed camera count {self.n_camera_range[0]}"
            )
        if self.frames_per_video < 1:
            raise ConfigError("frames_per_video must be >= 1")
        if self.n_videos < 1:
            raise ConfigError("n_videos must be >= 1")
        if self.clothing_source not in CLOTHING_SOURCES:
            raise ConfigError(f"clothing_source must be one of {CLOTHING_SOURCES}")
        if self.caption_mode not in CAPTION_MODES:
            raise ConfigError(f"caption_mode must be one of {CAPTION_MODES}")
        weights = dict(DEFAULT_STATEMENT_WEIGHTS)
        weights.update(self.statement_weights or {})
        for cat, w in weights.items():
            if cat not in DEFAULT_STATEMENT_WEIGHTS:
                raise ConfigError(f"unknown statement category '{cat}'")
            if not w >= 0:
                raise ConfigError(f"statement weight for '{cat}' must be >= 0, got {w}")
        self.statement_weights = weights
        if self.max_place_attempts < 1:
            raise ConfigError("max_place_attempts must be >= 1")
        w, h = self.image_size
        if w < 16 or h < 16:
            raise ConfigError("image_size must be at least 16x16")
        self.image_size = (int(w), int(h))

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["n_object_range"] = list(self.n_object_range)
        d["n_human_range"] = list(self.n_human_range)
        d["n_camera_range"] = list(self.n_camera_range)
        d["image_size"] = list(self.image_size)
        return d


def _as_range(value, name: str, bounds: tuple[int, int]) -> tuple[int, int]:
    try:
        lo, hi = int(value[0]), int(value[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"{name} must be a [lo, hi] pair") from exc
    if lo > hi:
        raise ConfigError(f"{name}: lo {lo} > hi {hi}")
    if lo < bounds[0] or hi > bounds[1]:
        raise ConfigError(f"{name} [{lo},{hi}] outside supported bounds {list(bounds)}")
    return (lo, hi)


def load_config(path: str | Path) -> GenerationConfig:
    """Read a config JSON file; unknown keys are rejected."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: parse error at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    known = set(GenerationConfig.__dataclass_fields__)
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    for key in ("n_object_range", "n_human_range", "n_camera_range", "image_size"):
        if key in doc:
            doc[key] = tuple(doc[key])
    return GenerationConfig(**doc)
