"""Per-frame structured metadata: the record captions are composed from.

One FrameMetadata is written per rendered sample as a UTF-8 JSON document.
Only instances passing the visibility threshold appear. Attribute words are
recorded exactly when they should be spoken: an attribute whose randomization
toggle is off (and whose value therefore equals the catalog default) is
stored as null and omitted from noun phrases. Human ordinals number the
visible humans 1..k in instance-id order. The caption shuffle seed, mode,
and statement weights are stored so captions can be regenerated exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .camera import Camera
from .catalog import size_class_for_extent
from .config import GenerationConfig
from .raster.buffers import FrameBuffers
from .relations import RelationSet, visible_instances
from .sampler import FrameState


class MetadataError(Exception):
    pass


@dataclass(frozen=True)
class MetaObject:
    instance_id: int
    noun: str
    color: str | None
    size: str | None
    material: str | None
    position: tuple[float, float, float]


@dataclass(frozen=True)
class MetaHuman:
    instance_id: int
    ordinal: int  # 1-based among visible humans
    action: str
    clothing_sentences: tuple[str, ...]


@dataclass(frozen=True)
class MetaCamera:
    camera_id: str
    position: tuple[float, float, float]
    look_at: tuple[float, float, float]
    vertical_fov: float
    image_size: tuple[int, int]


@dataclass(frozen=True)
class FrameMetadata:
    video_id: int
    frame_index: int
    camera_id: str
    scene_id: str
    env_id: str
    env_description: str
    objects: tuple[MetaObject, ...]
    humans: tuple[MetaHuman, ...]
    relations: RelationSet
    camera: MetaCamera
    caption_seed: int
    caption_mode: str = "full"
    statement_weights: dict[str, float] = field(default_factory=dict)

    def validate(self) -> None:
        ordinals = [h.ordinal for h in self.humans]
        if ordinals != list(range(1, len(ordinals) + 1)):
            raise MetadataError(f"human ordinals must be 1..k contiguous, got {ordinals}")
        ids = {o.instance_id for o in self.objects} | {h.instance_id for h in self.humans}
        for subj, pred, obj in self.relations.relations:
            if subj not in ids or obj not in ids:
                raise MetadataError(
                    f"relation ({subj}, {pred}, {obj}) references an unknown instance"
                )
            if subj == obj:
                raise MetadataError(f"self-relation on instance {subj}")


def build_frame_metadata(
    frame: FrameState,
    camera: Camera,
    buffers: FrameBuffers,
    relations: RelationSet,
    config: GenerationConfig,
    video_id: int,
    caption_seed: int,
) -> FrameMetadata:
    scene = frame.scene
    visible = set(visible_instances(frame, buffers))

    objects = []
    for obj in scene.objects:
        if obj.instance_id not in visible:
            continue
        size_word = size_class_for_extent(max(obj.model.base_extent) * obj.scale)
        objects.append(
            MetaObject(
                instance_id=obj.instance_id,
                noun=obj.model.noun,
                color=obj.color.name
                if (config.randomize_color or obj.color.id != obj.model.default_color)
                else None,
                size=size_word
                if (config.randomize_size or size_word != obj.model.size_class)
                else None,
                material=obj.material.name if config.randomize_material else None,
                position=obj.position,
            )
        )

    humans = []
    ordinal = 0
    for state in frame.humans:
        if state.instance_id not in visible:
            continue
        ordinal += 1
        hum = next(h for h in scene.humans if h.instance_id == state.instance_id)
        sentences = tuple(
            s.strip().rstrip(".") for s in hum.clothing.description_sentences
        )
        humans.append(
            MetaHuman(
                instance_id=state.instance_id,
                ordinal=ordinal,
                action=state.action,
                clothing_sentences=sentences,
            )
        )

    meta = FrameMetadata(
        video_id=video_id,
        frame_index=frame.frame_index,
        camera_id=camera.camera_id,
        scene_id=scene.scene_id,
        env_id=scene.env.id,
        env_description=scene.env.description,
        objects=tuple(objects),
        humans=tuple(humans),
        relations=relations,
        camera=MetaCamera(
            camera_id=camera.camera_id,
            position=camera.position,
            look_at=camera.look_at,
            vertical_fov=camera.vertical_fov,
            image_size=camera.image_size,
        ),
        caption_seed=caption_seed,
        caption_mode=config.caption_mode,
        statement_weights=dict(config.statement_weights),
    )
    meta.validate()
    return meta


def metadata_to_json(meta: FrameMetadata) -> str:
    doc = {
        "video_id": meta.video_id,
        "frame_index": meta.frame_index,
        "camera_id": meta.camera_id,
        "scene_id": meta.scene_id,
        "env_id": meta.env_id,
        "env_description": meta.env_description,
        "objects": [asdict(o) | {"position": list(o.position)} for o in meta.objects],
        "humans": [
            {
                "instance_id": h.instance_id,
                "ordinal": h.ordinal,
                "action": h.action,
                "clothing_sentences": list(h.clothing_sentences),
            }
            for h in meta.humans
        ],
        "relations": [list(r) for r in meta.relations.relations],
        "camera": {
            "camera_id": meta.camera.camera_id,
            "position": list(meta.camera.position),
            "look_at": list(meta.camera.look_at),
            "vertical_fov": meta.camera.vertical_fov,
            "image_size": list(meta.camera.image_size),
        },
        "caption_seed": meta.caption_seed,
        "caption_mode": meta.caption_mode,
        "statement_weights": meta.statement_weights,
    }
    return json.dumps(doc, sort_keys=True)


def metadata_from_json(text: str) -> FrameMetadata:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MetadataError(f"metadata parse error: {exc.msg} (line {exc.lineno})") from exc
    try:
        meta = FrameMetadata(
            video_id=int(doc["video_id"]),
            frame_index=int(doc["frame_index"]),
            camera_id=str(doc["camera_id"]),
            scene_id=str(doc["scene_id"]),
            env_id=str(doc["env_id"]),
            env_description=str(doc["env_description"]),
            objects=tuple(
                MetaObject(
                    instance_id=int(o["instance_id"]),
                    noun=str(o["noun"]),
                    color=o["color"],
                    size=o["size"],
                    material=o["material"],
                    position=tuple(o["position"]),
                )
                for o in doc["objects"]
            ),
            humans=tuple(
                MetaHuman(
                    instance_id=int(h["instance_id"]),
                    ordinal=int(h["ordinal"]),
                    action=str(h["action"]),
                    clothing_sentences=tuple(h["clothing_sentences"]),
                )
                for h in doc["humans"]
            ),
            relations=RelationSet(
                relations=tuple(
                    (int(s), str(p), int(o)) for s, p, o in doc["relations"]
                )
            ),
            camera=MetaCamera(
                camera_id=str(doc["camera"]["camera_id"]),
                position=tuple(doc["camera"]["position"]),
                look_at=tuple(doc["camera"]["look_at"]),
                vertical_fov=float(doc["camera"]["vertical_fov"]),
                image_size=tuple(doc["camera"]["image_size"]),
            ),
            caption_seed=int(doc["caption_seed"]),
            caption_mode=str(doc.get("caption_mode", "full")),
            statement_weights=dict(doc.get("statement_weights", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MetadataError(f"malformed metadata document: {exc!r}") from exc
    meta.validate()
    return meta


def load_metadata(path: str | Path) -> FrameMetadata:
    return metadata_from_json(Path(path).read_text("utf-8"))
