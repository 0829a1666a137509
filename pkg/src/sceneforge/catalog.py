"""Asset catalog: the static registry every sampler draws from.

The catalog ships as one UTF-8 JSON file with top-level arrays ``objects``,
``materials``, ``colors``, ``human_templates``, ``clothing_textures``,
``motion_clips``, ``scene_envs`` and a required ``catalog_version: 1``.
Rectangles are ``[x_min, z_min, x_max, z_max]`` in meters on the ground plane
(y is up, floor at y=0); extents are ``[width, height, depth]``.

``load_catalog`` refuses any file whose catalog would not validate cleanly, so
a loaded catalog always satisfies every invariant.  ``validate_catalog`` also
works on programmatically built catalogs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

MATERIAL_FAMILIES = ("metal", "cardboard", "wood", "ceramic", "glass")
GENDERS = ("male", "female", "neutral")
CLOTHING_SOURCES = ("plain_color", "surreal", "multigarment")
ENV_KINDS = ("indoor", "outdoor")
SIZE_CLASSES = ("small", "medium", "large")

# Max-extent thresholds (meters) separating the size classes.
SMALL_MAX_EXTENT = 0.3
MEDIUM_MAX_EXTENT = 1.0


def size_class_for_extent(max_extent: float) -> str:
    """Size word for an object whose largest dimension is ``max_extent``."""
    if max_extent < SMALL_MAX_EXTENT:
        return "small"
    if max_extent < MEDIUM_MAX_EXTENT:
        return "medium"
    return "large"


class CatalogError(Exception):
    """Raised when a catalog file cannot be loaded as a valid catalog."""


@dataclass(frozen=True)
class ObjectModel:
    id: str
    noun: str
    category_label: str
    size_class: str
    base_extent: tuple[float, float, float]  # (width, height, depth), meters
    allowed_material_families: tuple[str, ...]
    default_color: str


@dataclass(frozen=True)
class MaterialDef:
    id: str
    family: str
    name: str


@dataclass(frozen=True)
class ColorDef:
    id: str
    name: str
    rgb: tuple[float, float, float]


@dataclass(frozen=True)
class Capsule:
    name: str
    p0: tuple[float, float, float]  # endpoints in body frame, meters
    p1: tuple[float, float, float]
    radius: float


@dataclass(frozen=True)
class HumanTemplate:
    gender: str
    body_extent: tuple[float, float, float]
    collider_parts: tuple[Capsule, ...]


@dataclass(frozen=True)
class ClothingTexture:
    id: str
    source: str
    description_sentences: tuple[str, ...]
    tint: tuple[float, float, float]


@dataclass(frozen=True)
class ActionSegment:
    start: int  # frame, inclusive
    end: int  # frame, exclusive
    phrase: str


@dataclass(frozen=True)
class MotionClip:
    id: str
    fps: float
    n_frames: int
    action_segments: tuple[ActionSegment, ...]
    root_trajectory: tuple[tuple[float, float, float], ...]  # (x, z, heading) per frame


@dataclass(frozen=True)
class SceneEnv:
    id: str
    kind: str
    description: str
    floor_extent: tuple[float, float, float, float]  # x_min, z_min, x_max, z_max
    spawn_region: tuple[float, float, float, float]


@dataclass(frozen=True)
class AssetCatalog:
    objects: tuple[ObjectModel, ...]
    materials: tuple[MaterialDef, ...]
    colors: tuple[ColorDef, ...]
    human_templates: tuple[HumanTemplate, ...]
    clothing_textures: tuple[ClothingTexture, ...]
    motion_clips: tuple[MotionClip, ...]
    scene_envs: tuple[SceneEnv, ...]
    source_bytes_sha256: str = ""

    def object_by_id(self, oid: str) -> ObjectModel:
        return _index(self.objects)[oid]

    def material_by_id(self, mid: str) -> MaterialDef:
        return _index(self.materials)[mid]

    def color_by_id(self, cid: str) -> ColorDef:
        return _index(self.colors)[cid]

    def clothing_by_id(self, cid: str) -> ClothingTexture:
        return _index(self.clothing_textures)[cid]

    def clip_by_id(self, cid: str) -> MotionClip:
        return _index(self.motion_clips)[cid]

    def env_by_id(self, eid: str) -> SceneEnv:
        return _index(self.scene_envs)[eid]

    def template_by_gender(self, gender: str) -> HumanTemplate:
        for t in self.human_templates:
            if t.gender == gender:
                return t
        raise KeyError(gender)

    def materials_in_families(self, families: tuple[str, ...]) -> list[MaterialDef]:
        return [m for m in self.materials if m.family in families]

    def default_material_for(self, obj: ObjectModel) -> MaterialDef:
        """First catalog material in the object's first allowed family."""
        fam = obj.allowed_material_families[0]
        for m in self.materials:
            if m.family == fam:
                return m
        raise KeyError(fam)

    def category_ids(self) -> dict[str, int]:
        """Stable category-label -> id map. 0 is background, 'person' included."""
        labels = sorted({o.category_label for o in self.objects} | {"person"})
        return {label: i + 1 for i, label in enumerate(labels)}


_INDEX_CACHE: dict[int, dict] = {}


def _index(items) -> dict:
    key = id(items)
    cached = _INDEX_CACHE.get(key)
    if cached is None:
        cached = {it.id: it for it in items}
        _INDEX_CACHE[key] = cached
    return cached


@dataclass
class Finding:
    where: str  # offending id or path
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, where: str, message: str) -> None:
        self.findings.append(Finding(where, message))

    def __str__(self) -> str:
        if self.ok:
            return "catalog OK (0 findings)"
        lines = [f"{len(self.findings)} finding(s):"]
        lines += [f"  - {f}" for f in self.findings]
        return "\n".join(lines)


def _require(entry: dict, key: str, where: str):
    if key not in entry:
        raise CatalogError(f"{where}: missing field '{key}'")
    return entry[key]


def _vec(value, n: int, where: str) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise CatalogError(f"{where}: expected a {n}-element array, got {value!r}")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise CatalogError(f"{where}: non-numeric component in {value!r}") from exc


def _check_duplicates(items, kind: str) -> None:
    seen = set()
    for it in items:
        if it.id in seen:
            raise CatalogError(f"duplicate {kind} id '{it.id}'")
        seen.add(it.id)


def load_catalog(path: str | Path) -> AssetCatalog:
    """Load and fully validate a catalog file.

    Raises CatalogError naming the offending id (or the parse position) on
    any defect; a returned catalog always passes validate_catalog cleanly.
    """
    path = Path(path)
    raw = path.read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: parse error at line {exc.lineno}: {exc.msg}") from exc

    if not isinstance(doc, dict):
        raise CatalogError(f"{path}: top level must be a JSON object")
    if doc.get("catalog_version") != 1:
        raise CatalogError(f"{path}: missing or unsupported catalog_version (want 1)")

    objects = []
    for entry in doc.get("objects", []):
        oid = str(_require(entry, "id", "object"))
        where = f"object '{oid}'"
        objects.append(
            ObjectModel(
                id=oid,
                noun=str(_require(entry, "noun", where)),
                category_label=str(_require(entry, "category_label", where)),
                size_class=str(_require(entry, "size_class", where)),
                base_extent=_vec(_require(entry, "base_extent", where), 3, where),
                allowed_material_families=tuple(
                    str(f) for f in _require(entry, "allowed_material_families", where)
                ),
                default_color=str(_require(entry, "default_color", where)),
            )
        )
    materials = []
    for entry in doc.get("materials", []):
        mid = str(_require(entry, "id", "material"))
        where = f"material '{mid}'"
        materials.append(
            MaterialDef(
                id=mid,
                family=str(_require(entry, "family", where)),
                name=str(_require(entry, "name", where)),
            )
        )
    colors = []
    for entry in doc.get("colors", []):
        cid = str(_require(entry, "id", "color"))
        where = f"color '{cid}'"
        colors.append(
            ColorDef(
                id=cid,
                name=str(_require(entry, "name", where)),
                rgb=_vec(_require(entry, "rgb", where), 3, where),
            )
        )
    templates = []
    for entry in doc.get("human_templates", []):
        gender = str(_require(entry, "gender", "human_template"))
        where = f"human_template '{gender}'"
        parts = []
        for part in _require(entry, "collider_parts", where):
            pwhere = f"{where} collider"
            parts.append(
                Capsule(
                    name=str(_require(part, "name", pwhere)),
                    p0=_vec(_require(part, "p0", pwhere), 3, pwhere),
                    p1=_vec(_require(part, "p1", pwhere), 3, pwhere),
                    radius=float(_require(part, "radius", pwhere)),
                )
            )
        templates.append(
            HumanTemplate(
                gender=gender,
                body_extent=_vec(_require(entry, "body_extent", where), 3, where),
                collider_parts=tuple(parts),
            )
        )
    clothing = []
    for entry in doc.get("clothing_textures", []):
        cid = str(_require(entry, "id", "clothing_texture"))
        where = f"clothing_texture '{cid}'"
        clothing.append(
            ClothingTexture(
                id=cid,
                source=str(_require(entry, "source", where)),
                description_sentences=tuple(
                    str(s) for s in _require(entry, "description_sentences", where)
                ),
                tint=_vec(_require(entry, "tint", where), 3, where),
            )
        )
    clips = []
    for entry in doc.get("motion_clips", []):
        cid = str(_require(entry, "id", "motion_clip"))
        where = f"motion_clip '{cid}'"
        segments = tuple(
            ActionSegment(
                start=int(_require(seg, "start", where)),
                end=int(_require(seg, "end", where)),
                phrase=str(_require(seg, "phrase", where)),
            )
            for seg in _require(entry, "action_segments", where)
        )
        trajectory = tuple(
            _vec(row, 3, f"{where} trajectory")
            for row in _require(entry, "root_trajectory", where)
        )
        clips.append(
            MotionClip(
                id=cid,
                fps=float(_require(entry, "fps", where)),
                n_frames=int(_require(entry, "n_frames", where)),
                action_segments=segments,
                root_trajectory=trajectory,
            )
        )
    envs = []
    for entry in doc.get("scene_envs", []):
        eid = str(_require(entry, "id", "scene_env"))
        where = f"scene_env '{eid}'"
        envs.append(
            SceneEnv(
                id=eid,
                kind=str(_require(entry, "kind", where)),
                description=str(_require(entry, "description", where)),
                floor_extent=_vec(_require(entry, "floor_extent", where), 4, where),
                spawn_region=_vec(_require(entry, "spawn_region", where), 4, where),
            )
        )

    _check_duplicates(objects, "object")
    _check_duplicates(materials, "material")
    _check_duplicates(colors, "color")
    _check_duplicates(clothing, "clothing_texture")
    _check_duplicates(clips, "motion_clip")
    _check_duplicates(envs, "scene_env")

    color_ids = {c.id for c in colors}
    for obj in objects:
        if obj.default_color not in color_ids:
            raise CatalogError(
                f"object '{obj.id}': dangling reference to color '{obj.default_color}'"
            )

    import hashlib

    catalog = AssetCatalog(
        objects=tuple(objects),
        materials=tuple(materials),
        colors=tuple(colors),
        human_templates=tuple(templates),
        clothing_textures=tuple(clothing),
        motion_clips=tuple(clips),
        scene_envs=tuple(envs),
        source_bytes_sha256=hashlib.sha256(raw).hexdigest(),
    )
    report = validate_catalog(catalog)
    if not report.ok:
        raise CatalogError(f"{path}: invalid catalog\n{report}")
    return catalog


def validate_catalog(catalog: AssetCatalog) -> ValidationReport:
    """Check every type invariant; findings are data, never exceptions."""
    rep = ValidationReport()

    color_ids = {c.id for c in catalog.colors}
    seen: set[str] = set()
    for obj in catalog.objects:
        where = f"object '{obj.id}'"
        if obj.id in seen:
            rep.add(where, "duplicate id")
        seen.add(obj.id)
        if not all(math.isfinite(v) and v > 0 for v in obj.base_extent):
            rep.add(where, f"base_extent components must be positive finite, got {obj.base_extent}")
        if not obj.allowed_material_families:
            rep.add(where, "allowed_material_families is empty")
        for fam in obj.allowed_material_families:
            if fam not in MATERIAL_FAMILIES:
                rep.add(where, f"unknown material family '{fam}'")
        if obj.default_color not in color_ids:
            rep.add(where, f"default_color '{obj.default_color}' not in catalog")
        if obj.size_class not in SIZE_CLASSES:
            rep.add(where, f"unknown size_class '{obj.size_class}'")
        elif obj.size_class != size_class_for_extent(max(obj.base_extent)):
            rep.add(
                where,
                f"size_class '{obj.size_class}' inconsistent with max extent "
                f"{max(obj.base_extent):g} m (expect '{size_class_for_extent(max(obj.base_extent))}')",
            )

    for mat in catalog.materials:
        if mat.family not in MATERIAL_FAMILIES:
            rep.add(f"material '{mat.id}'", f"family '{mat.family}' not one of {MATERIAL_FAMILIES}")

    for color in catalog.colors:
        if not all(0.0 <= v <= 1.0 for v in color.rgb):
            rep.add(f"color '{color.id}'", f"rgb components must be in [0,1], got {color.rgb}")

    genders = [t.gender for t in catalog.human_templates]
    if sorted(genders) != sorted(GENDERS):
        rep.add("human_templates", f"expected exactly the three templates {GENDERS}, got {genders}")
    for tpl in catalog.human_templates:
        where = f"human_template '{tpl.gender}'"
        if not tpl.collider_parts:
            rep.add(where, "collider_parts is empty")
        for part in tpl.collider_parts:
            if not part.radius > 0:
                rep.add(where, f"collider part '{part.name}' has non-positive radius {part.radius}")
        if not all(math.isfinite(v) and v > 0 for v in tpl.body_extent):
            rep.add(where, f"body_extent must be positive, got {tpl.body_extent}")

    for cloth in catalog.clothing_textures:
        where = f"clothing_texture '{cloth.id}'"
        if cloth.source not in CLOTHING_SOURCES:
            rep.add(where, f"unknown source '{cloth.source}'")
        if cloth.source == "multigarment" and not cloth.description_sentences:
            rep.add(where, "multigarment texture must carry description_sentences")

    for clip in catalog.motion_clips:
        where = f"motion_clip '{clip.id}'"
        if not clip.fps > 0:
            rep.add(where, f"fps must be > 0, got {clip.fps}")
        if not clip.n_frames > 0:
            rep.add(where, f"n_frames must be > 0, got {clip.n_frames}")
        if len(clip.root_trajectory) != clip.n_frames:
            rep.add(
                where,
                f"trajectory length {len(clip.root_trajectory)} != n_frames {clip.n_frames}",
            )
        cursor = 0
        for seg in sorted(clip.action_segments, key=lambda s: s.start):
            if seg.start > cursor:
                rep.add(where, f"uncovered frames [{cursor},{seg.start})")
            elif seg.start < cursor:
                rep.add(where, f"overlapping segments at frame {seg.start}")
            cursor = max(cursor, seg.end)
        if cursor < clip.n_frames:
            rep.add(where, f"uncovered frames [{cursor},{clip.n_frames})")
        elif cursor > clip.n_frames:
            rep.add(where, f"segments extend past n_frames ({cursor} > {clip.n_frames})")

    for env in catalog.scene_envs:
        where = f"scene_env '{env.id}'"
        if env.kind not in ENV_KINDS:
            rep.add(where, f"unknown kind '{env.kind}'")
        fx0, fz0, fx1, fz1 = env.floor_extent
        sx0, sz0, sx1, sz1 = env.spawn_region
        if not (fx0 < fx1 and fz0 < fz1):
            rep.add(where, f"degenerate floor_extent {env.floor_extent}")
        if not (sx0 < sx1 and sz0 < sz1):
            rep.add(where, f"degenerate spawn_region {env.spawn_region}")
        if not (sx0 >= fx0 and sz0 >= fz0 and sx1 <= fx1 and sz1 <= fz1):
            rep.add(where, "spawn_region not contained in floor_extent")

    return rep


def demo_catalog_path() -> Path:
    """Path of the bundled demo catalog."""
    return Path(resources.files("sceneforge").joinpath("data/demo_catalog.json"))
