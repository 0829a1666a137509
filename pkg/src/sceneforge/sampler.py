"""Domain-randomized scene sampling, gravity settling, and frame advance.

Randomization structure: every sampled aspect of every entity draws from its
own substream keyed as e.g. ``object:3:color``, all derived from the scene
stream. Disabling one randomization toggle therefore changes only the fields
that toggle owns; everything else stays bit-identical for the same seed.

Physics is deliberately minimal: objects are dropped onto the floor (their
collision box bottom lands exactly at y=0) and de-overlapped by re-sampling
positions inside the spawn region; collision volumes are the world-space
axis-aligned boxes of the placed primitives. Walking humans are swept as a
vertical cylinder of radius ``collision_radius`` against object boxes and
freeze at their first contact point for the rest of the video.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .camera import CameraRig, place_camera_ring
from .catalog import (
    AssetCatalog,
    ClothingTexture,
    ColorDef,
    HumanTemplate,
    MaterialDef,
    MotionClip,
    ObjectModel,
)
from .config import SIZE_SCALE_RANGE, GenerationConfig
from .geometry import Aabb, Rect, segment_aabb_entry, yaw_box_aabb
from .rng import Stream

# Height band for initial (pre-settling) object centers; with physics off the
# scene keeps these floating poses.
FLOAT_HEIGHT_RANGE = (0.0, 1.8)

CAMERA_TARGET_HEIGHT = 1.0


class PlacementError(Exception):
    def __init__(self, scene_id: str, message: str):
        super().__init__(f"{scene_id}: {message}")
        self.scene_id = scene_id


@dataclass(frozen=True)
class PlacedObject:
    instance_id: int
    model: ObjectModel
    material: MaterialDef
    color: ColorDef
    scale: float
    position: tuple[float, float, float]  # box center
    yaw: float

    @property
    def half_extent(self) -> tuple[float, float, float]:
        w, h, d = self.model.base_extent
        return (w * self.scale / 2.0, h * self.scale / 2.0, d * self.scale / 2.0)

    @property
    def aabb(self) -> Aabb:
        return yaw_box_aabb(self.position, self.half_extent, self.yaw)


@dataclass(frozen=True)
class PlacedHuman:
    instance_id: int
    template: HumanTemplate
    clothing: ClothingTexture
    clip: MotionClip
    start_position: tuple[float, float]  # (x, z) on the floor
    start_heading: float
    motion_start_frame: int

    @property
    def height(self) -> float:
        return self.template.body_extent[1]

    @property
    def collision_radius(self) -> float:
        w, _, d = self.template.body_extent
        return max(w, d) / 2.0

    def aabb_at(self, x: float, z: float) -> Aabb:
        r, h = self.collision_radius, self.height
        return Aabb((x - r, 0.0, z - r), (x + r, h, z + r))


@dataclass(frozen=True)
class HumanState:
    instance_id: int
    position: tuple[float, float, float]
    heading: float
    action: str


@dataclass
class SceneInstance:
    scene_id: str
    env: "SceneEnv"  # noqa: F821 - sceneforge.catalog.SceneEnv
    objects: tuple[PlacedObject, ...]
    humans: tuple[PlacedHuman, ...]
    cameras: CameraRig
    rng_trace_seed: int
    config: GenerationConfig
    settled: bool = False
    _paths: dict = field(default_factory=dict, compare=False, repr=False)

    def human_path(self, index: int) -> tuple[tuple[float, float, float], ...]:
        """Per-frame (x, z, heading) for one human, collision-clipped."""
        if index not in self._paths:
            self._paths[index] = _clipped_path(self, self.humans[index])
        return self._paths[index]


@dataclass(frozen=True)
class FrameState:
    scene: SceneInstance
    frame_index: int
    humans: tuple[HumanState, ...]

    @property
    def objects(self) -> tuple[PlacedObject, ...]:
        return self.scene.objects


def sample_scene(
    config: GenerationConfig,
    catalog: AssetCatalog,
    stream: Stream,
    scene_id: str = "scene",
) -> SceneInstance:
    """Sample one scene arrangement (not yet settled)."""
    env = stream.derive("env").choice(catalog.scene_envs)
    spawn = Rect.of(env.spawn_region)

    n_objects = stream.derive("object_count").randint(*config.n_object_range)
    n_humans = stream.derive("human_count").randint(*config.n_human_range)
    if not config.multi_human_enabled:
        n_humans = min(n_humans, 1)
    n_cameras = stream.derive("camera_count").randint(*config.n_camera_range)

    objects = []
    for i in range(n_objects):
        key = f"object:{i}"
        model = stream.derive(f"{key}:model").choice(catalog.objects)
        scale = (
            stream.derive(f"{key}:scale").uniform(*SIZE_SCALE_RANGE)
            if config.randomize_size
            else 1.0
        )
        if config.randomize_color:
            color = stream.derive(f"{key}:color").choice(catalog.colors)
        else:
            color = catalog.color_by_id(model.default_color)
        if config.randomize_material:
            pool = catalog.materials_in_families(model.allowed_material_families)
            if not pool:
                raise PlacementError(scene_id, f"no materials for object '{model.id}'")
            material = stream.derive(f"{key}:material").choice(pool)
        else:
            material = catalog.default_material_for(model)
        yaw = stream.derive(f"{key}:yaw").uniform(0.0, 2.0 * math.pi)

        w, h, d = model.base_extent
        half = (w * scale / 2.0, h * scale / 2.0, d * scale / 2.0)
        foot = yaw_box_aabb((0.0, 0.0, 0.0), half, yaw)
        region = spawn.inset(foot.hi[0], foot.hi[2])
        if region is None:
            raise PlacementError(
                scene_id, f"object '{model.id}' footprint exceeds spawn region"
            )
        pos_stream = stream.derive(f"{key}:position")
        x = pos_stream.uniform(region.x0, region.x1)
        z = pos_stream.uniform(region.z0, region.z1)
        y = half[1] + pos_stream.uniform(*FLOAT_HEIGHT_RANGE)
        objects.append(
            PlacedObject(
                instance_id=i + 1,
                model=model,
                material=material,
                color=color,
                scale=scale,
                position=(x, y, z),
                yaw=yaw,
            )
        )

    clothing_pool = [
        c for c in catalog.clothing_textures if c.source == config.clothing_source
    ]
    humans = []
    for j in range(n_humans):
        key = f"human:{j}"
        template = stream.derive(f"{key}:template").choice(catalog.human_templates)
        if not clothing_pool:
            raise PlacementError(
                scene_id, f"no clothing textures with source '{config.clothing_source}'"
            )
        clothing = stream.derive(f"{key}:clothing").choice(clothing_pool)
        clip = stream.derive(f"{key}:motion").choice(catalog.motion_clips)
        start_frame = stream.derive(f"{key}:start_frame").randint(0, clip.n_frames - 1)
        heading = stream.derive(f"{key}:heading").uniform(0.0, 2.0 * math.pi)
        r = max(template.body_extent[0], template.body_extent[2]) / 2.0
        region = spawn.inset(r, r)
        if region is None:
            raise PlacementError(scene_id, "human footprint exceeds spawn region")
        pos_stream = stream.derive(f"{key}:position")
        x = pos_stream.uniform(region.x0, region.x1)
        z = pos_stream.uniform(region.z0, region.z1)
        humans.append(
            PlacedHuman(
                instance_id=n_objects + j + 1,
                template=template,
                clothing=clothing,
                clip=clip,
                start_position=(x, z),
                start_heading=heading,
                motion_start_frame=start_frame,
            )
        )

    rig = place_camera_ring(
        center=(spawn.center[0], CAMERA_TARGET_HEIGHT, spawn.center[1]),
        n=n_cameras,
        stream=stream.derive("cameras"),
        image_size=config.image_size,
    )

    return SceneInstance(
        scene_id=scene_id,
        env=env,
        objects=tuple(objects),
        humans=tuple(humans),
        cameras=rig,
        rng_trace_seed=stream.derive("trace").next_u64(),
        config=config,
    )


def settle_physics(scene: SceneInstance) -> SceneInstance:
    """Drop objects to the floor and de-overlap all collision boxes.

    With physics disabled the scene passes through unchanged (floating,
    possibly overlapping poses). With physics enabled, every object box
    bottom ends exactly at y=0 and no object-object or human-object boxes
    interpenetrate; offenders are re-placed by rejection sampling from the
    scene's settle substreams, bounded by max_place_attempts.
    """
    if not scene.config.physics_enabled:
        return scene

    spawn = Rect.of(scene.env.spawn_region)
    attempts_max = scene.config.max_place_attempts
    trace = Stream(scene.rng_trace_seed)

    # Largest footprints claim space first; output order stays by instance id.
    def _footprint(o: PlacedObject) -> float:
        box = o.aabb
        return (box.hi[0] - box.lo[0]) * (box.hi[2] - box.lo[2])

    order = sorted(scene.objects, key=lambda o: (-_footprint(o), o.instance_id))
    settled: list[PlacedObject] = []
    boxes: list[Aabb] = []
    for obj in order:
        half = obj.half_extent
        grounded = replace(
            obj, position=(obj.position[0], half[1], obj.position[2])
        )
        foot = yaw_box_aabb((0.0, 0.0, 0.0), half, obj.yaw)
        region = spawn.inset(foot.hi[0], foot.hi[2])
        if region is None:
            raise PlacementError(scene.scene_id, f"object '{obj.model.id}' cannot fit")
        retry = trace.derive(f"settle:object:{obj.instance_id}")
        attempts = 0
        while any(grounded.aabb.overlaps(b) for b in boxes):
            attempts += 1
            if attempts > attempts_max:
                raise PlacementError(
                    scene.scene_id,
                    f"object '{obj.model.id}' not placeable after {attempts_max} attempts",
                )
            x = retry.uniform(region.x0, region.x1)
            z = retry.uniform(region.z0, region.z1)
            grounded = replace(grounded, position=(x, half[1], z))
        settled.append(grounded)
        boxes.append(grounded.aabb)
    settled.sort(key=lambda o: o.instance_id)

    placed_humans: list[PlacedHuman] = []
    for hum in scene.humans:
        r = hum.collision_radius
        region = spawn.inset(r, r)
        if region is None:
            raise PlacementError(scene.scene_id, "human cannot fit in spawn region")
        retry = trace.derive(f"settle:human:{hum.instance_id}")
        attempts = 0
        current = hum
        while any(
            current.aabb_at(*current.start_position).overlaps(b) for b in boxes
        ):
            attempts += 1
            if attempts > attempts_max:
                raise PlacementError(
                    scene.scene_id,
                    f"human {hum.instance_id} not placeable after {attempts_max} attempts",
                )
            x = retry.uniform(region.x0, region.x1)
            z = retry.uniform(region.z0, region.z1)
            current = replace(current, start_position=(x, z))
        placed_humans.append(current)

    return SceneInstance(
        scene_id=scene.scene_id,
        env=scene.env,
        objects=tuple(settled),
        humans=tuple(placed_humans),
        cameras=scene.cameras,
        rng_trace_seed=scene.rng_trace_seed,
        config=scene.config,
        settled=True,
    )


def advance_frame(scene: SceneInstance, t: int) -> FrameState:
    """Snapshot of the scene at frame t (objects static, humans animated)."""
    if not 0 <= t < scene.config.frames_per_video:
        raise ValueError(
            f"frame {t} out of range [0, {scene.config.frames_per_video})"
        )
    states = []
    for idx, hum in enumerate(scene.humans):
        x, z, heading = scene.human_path(idx)[t]
        clip_frame = (hum.motion_start_frame + t) % hum.clip.n_frames
        states.append(
            HumanState(
                instance_id=hum.instance_id,
                position=(x, 0.0, z),
                heading=heading,
                action=action_at(hum.clip, clip_frame),
            )
        )
    return FrameState(scene=scene, frame_index=t, humans=tuple(states))


def action_at(clip: MotionClip, frame: int) -> str:
    for seg in clip.action_segments:
        if seg.start <= frame < seg.end:
            return seg.phrase
    raise ValueError(f"clip '{clip.id}': no action segment covers frame {frame}")


def raw_human_pose(hum: PlacedHuman, t: int) -> tuple[float, float, float]:
    """Unclipped world (x, z, heading) at video frame t.

    The clip trajectory is anchored at motion_start_frame: the rigid transform
    that carries the clip pose at that frame onto the sampled start pose is
    applied to every frame, so the t=0 pose is exactly the start pose (and
    stays inside the spawn region). Frames wrap around the clip end.
    """
    traj = hum.clip.root_trajectory
    f0 = hum.motion_start_frame
    f = (f0 + t) % hum.clip.n_frames
    ax, az, ah = traj[f0]
    px, pz, ph = traj[f]
    dx, dz = px - ax, pz - az
    rot = hum.start_heading - ah
    c, s = math.cos(rot), math.sin(rot)
    # rot_y convention: x' = c*x + s*z, z' = -s*x + c*z
    wx = hum.start_position[0] + c * dx + s * dz
    wz = hum.start_position[1] - s * dx + c * dz
    return (wx, wz, hum.start_heading + (ph - ah))


def _clipped_path(
    scene: SceneInstance, hum: PlacedHuman
) -> tuple[tuple[float, float, float], ...]:
    n = scene.config.frames_per_video
    poses = [raw_human_pose(hum, t) for t in range(n)]

    r, height = hum.collision_radius, hum.height
    boxes = [
        obj.aabb.inflate_xz(r)
        for obj in scene.objects
        if obj.aabb.lo[1] < height and obj.aabb.hi[1] > 0.0
    ]
    if not boxes:
        return tuple(poses)

    freeze_from = None
    frozen_xz = None
    if any(b.contains_xz(poses[0][0], poses[0][1]) for b in boxes):
        freeze_from, frozen_xz = 0, (poses[0][0], poses[0][1])
    else:
        for t in range(1, n):
            p0 = (poses[t - 1][0], 0.0, poses[t - 1][1])
            p1 = (poses[t][0], 0.0, poses[t][1])
            best = None
            for b in boxes:
                s = segment_aabb_entry(p0, p1, b)
                if s is not None and (best is None or s < best):
                    best = s
            if best is not None:
                freeze_from = t
                frozen_xz = (
                    p0[0] + best * (p1[0] - p0[0]),
                    p0[2] + best * (p1[2] - p0[2]),
                )
                break

    if freeze_from is not None:
        heading = poses[freeze_from][2]
        for t in range(freeze_from, n):
            poses[t] = (frozen_xz[0], frozen_xz[1], heading)
    return tuple(poses)
