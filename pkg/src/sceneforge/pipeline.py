"""End-to-end dataset generation, the manifest, stats, and recaptioning.

Output tree:

    <out>/
      manifest.jsonl          one JSON record per rendered sample
      manifest_header.json    written last (atomicity anchor)
      videos/v0013/f0002_cam05.rgb.ppm | .depth.f32 | .imask.pgm
                            | .cmask.pgm | .meta.json

The whole tree is a pure function of (config, catalog): per-video work is
seeded by video index, per-frame viewpoint draws and per-sample caption seeds
by purpose-keyed substreams, so repeated runs are byte-identical and videos
can be generated in parallel. Videos that cannot place their objects are
counted; generation aborts when more than 10% of videos fail.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import AssetCatalog
from .config import GenerationConfig
from .grammar import compose_caption
from .metadata import (
    FrameMetadata,
    build_frame_metadata,
    load_metadata,
    metadata_to_json,
)
from .raster import (
    rasterize_frame,
    write_depth,
    write_pgm16,
    write_ppm,
)
from .relations import extract_relations
from .rng import Stream, derive_seed
from .sampler import PlacementError, advance_frame, sample_scene, settle_physics

MANIFEST_NAME = "manifest.jsonl"
HEADER_NAME = "manifest_header.json"
FORMAT_VERSION = 1
ABORT_FAILURE_FRACTION = 0.10


class GenerationAbort(Exception):
    def __init__(self, failed: int, total: int, reasons: list[str]):
        super().__init__(
            f"{failed}/{total} videos failed placement (> {ABORT_FAILURE_FRACTION:.0%}); "
            + "; ".join(reasons[:5])
        )
        self.failed = failed
        self.total = total


@dataclass
class DatasetManifest:
    header: dict
    records: list[dict] = field(default_factory=list)

    @property
    def manifest_path(self) -> Path:
        return Path(self.header["out_dir"]) / MANIFEST_NAME


def default_workers() -> int:
    env = os.environ.get("FORGE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _sample_paths(video_id: int, frame: int, camera_id: str) -> dict[str, str]:
    stem = f"videos/v{video_id:04d}/f{frame:04d}_{camera_id}"
    return {
        "rgb": f"{stem}.rgb.ppm",
        "depth": f"{stem}.depth.f32",
        "instance_mask": f"{stem}.imask.pgm",
        "category_mask": f"{stem}.cmask.pgm",
        "metadata": f"{stem}.meta.json",
    }


def _generate_video(args) -> tuple[int, list[dict] | None, str | None]:
    """Worker: renders one whole video; returns (video_id, records, error)."""
    video_id, config, catalog, out_dir, category_ids = args
    out = Path(out_dir)
    video_seed = derive_seed(config.seed, f"video:{video_id}")
    stream = Stream(video_seed)
    try:
        scene = sample_scene(config, catalog, stream, scene_id=f"v{video_id:04d}")
        scene = settle_physics(scene)
    except PlacementError as exc:
        return video_id, None, str(exc)

    (out / f"videos/v{video_id:04d}").mkdir(parents=True, exist_ok=True)
    cams = scene.cameras.cameras
    records = []
    for t in range(config.frames_per_video):
        frame = advance_frame(scene, t)
        picks = stream.derive(f"frame:{t}:viewpoints").sample_indices(
            len(cams), config.viewpoints_per_frame
        )
        for cam_index in picks:
            camera = cams[cam_index]
            buffers = rasterize_frame(frame, camera, category_ids)
            relations = extract_relations(frame, camera, buffers)
            caption_seed = derive_seed(
                video_seed, f"frame:{t}:caption:{camera.camera_id}"
            )
            meta = build_frame_metadata(
                frame, camera, buffers, relations, config, video_id, caption_seed
            )
            caption = compose_caption(
                meta,
                Stream(caption_seed),
                mode=config.caption_mode,
                weights=config.statement_weights,
            )
            paths = _sample_paths(video_id, t, camera.camera_id)
            write_ppm(out / paths["rgb"], buffers.rgb)
            write_depth(out / paths["depth"], buffers.depth)
            write_pgm16(out / paths["instance_mask"], buffers.instance_mask)
            write_pgm16(out / paths["category_mask"], buffers.category_mask)
            (out / paths["metadata"]).write_text(metadata_to_json(meta), "utf-8")
            records.append(
                {
                    "sample_id": f"v{video_id:04d}-f{t:04d}-{camera.camera_id}",
                    "video_id": video_id,
                    "frame_index": t,
                    "camera_id": camera.camera_id,
                    **paths,
                    "caption": caption.full_text,
                }
            )
    return video_id, records, None


def generate_dataset(
    config: GenerationConfig,
    catalog: AssetCatalog,
    out_dir: str | Path,
    workers: int | None = None,
    config_digest: str | None = None,
) -> DatasetManifest:
    """Generate the full dataset tree; returns the written manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_probe"
    try:
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise PermissionError(f"output directory {out} is not writable: {exc}") from exc

    if config_digest is None:
        canonical = json.dumps(config.to_json_dict(), sort_keys=True).encode("utf-8")
        config_digest = hashlib.sha256(canonical).hexdigest()
    category_ids = catalog.category_ids()

    workers = workers or default_workers()
    jobs = [
        (v, config, catalog, str(out), category_ids) for v in range(config.n_videos)
    ]
    if workers <= 1 or config.n_videos == 1:
        results = [_generate_video(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_generate_video, jobs))

    results.sort(key=lambda r: r[0])
    failures = [(vid, err) for vid, recs, err in results if recs is None]
    if len(failures) > ABORT_FAILURE_FRACTION * config.n_videos:
        raise GenerationAbort(
            len(failures), config.n_videos, [err for _, err in failures]
        )

    records: list[dict] = []
    for _, recs, _ in results:
        if recs is not None:
            records.extend(recs)

    tmp = out / (MANIFEST_NAME + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True) + "\n")
    tmp.replace(out / MANIFEST_NAME)

    header = {
        "format_version": FORMAT_VERSION,
        "master_seed": config.seed,
        "config_digest": config_digest,
        "catalog_digest": catalog.source_bytes_sha256,
        "counts": {
            "videos": config.n_videos - len(failures),
            "frames": (config.n_videos - len(failures)) * config.frames_per_video,
            "samples": len(records),
        },
        "failed_videos": len(failures),
        "category_ids": category_ids,
        "effective_config": config.to_json_dict(),
    }
    (out / HEADER_NAME).write_text(
        json.dumps(header, indent=1, sort_keys=True) + "\n", "utf-8"
    )
    return DatasetManifest(header=header | {"out_dir": str(out)}, records=records)


def read_manifest(manifest_path: str | Path) -> DatasetManifest:
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / MANIFEST_NAME
    header_path = manifest_path.parent / HEADER_NAME
    header = json.loads(header_path.read_text("utf-8")) if header_path.exists() else {}
    records = []
    with open(manifest_path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return DatasetManifest(
        header=header | {"out_dir": str(manifest_path.parent)}, records=records
    )


@dataclass
class StatsReport:
    samples: int = 0
    colors: dict[str, int] = field(default_factory=dict)
    materials: dict[str, int] = field(default_factory=dict)
    sizes: dict[str, int] = field(default_factory=dict)
    predicates: dict[str, int] = field(default_factory=dict)
    actions: dict[str, int] = field(default_factory=dict)
    objects_per_scene: tuple[int, int] | None = None
    humans_per_scene: tuple[int, int] | None = None
    missing_files: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "samples": self.samples,
            "colors": self.colors,
            "materials": self.materials,
            "sizes": self.sizes,
            "relation_predicates": self.predicates,
            "actions": self.actions,
            "objects_per_scene": list(self.objects_per_scene or ()),
            "humans_per_scene": list(self.humans_per_scene or ()),
            "missing_files": self.missing_files,
        }

    def to_text(self) -> str:
        lines = [f"samples: {self.samples}"]

        def block(title, counts):
            lines.append(f"{title}:")
            for key in sorted(counts):
                lines.append(f"  {key}: {counts[key]}")

        block("colors", self.colors)
        block("materials", self.materials)
        block("sizes", self.sizes)
        block("relation predicates", self.predicates)
        block("actions", self.actions)
        if self.objects_per_scene:
            lines.append(
                f"objects per scene: min {self.objects_per_scene[0]} max {self.objects_per_scene[1]}"
            )
        if self.humans_per_scene:
            lines.append(
                f"humans per scene: min {self.humans_per_scene[0]} max {self.humans_per_scene[1]}"
            )
        if self.missing_files:
            lines.append(f"missing files ({len(self.missing_files)}):")
            lines.extend(f"  {p}" for p in self.missing_files)
        return "\n".join(lines)


def dataset_stats(manifest_path: str | Path) -> StatsReport:
    """Attribute/relation/action tallies over every sample's metadata."""
    manifest = read_manifest(manifest_path)
    base = Path(manifest.header["out_dir"])
    report = StatsReport(samples=len(manifest.records))
    obj_counts: list[int] = []
    hum_counts: list[int] = []
    for record in manifest.records:
        meta_path = base / record["metadata"]
        if not meta_path.exists():
            report.missing_files.append(record["metadata"])
            continue
        meta = load_metadata(meta_path)
        for obj in meta.objects:
            if obj.color:
                report.colors[obj.color] = report.colors.get(obj.color, 0) + 1
            if obj.material:
                report.materials[obj.material] = report.materials.get(obj.material, 0) + 1
            if obj.size:
                report.sizes[obj.size] = report.sizes.get(obj.size, 0) + 1
        for _, pred, _ in meta.relations.relations:
            report.predicates[pred] = report.predicates.get(pred, 0) + 1
        for hum in meta.humans:
            report.actions[hum.action] = report.actions.get(hum.action, 0) + 1
        obj_counts.append(len(meta.objects))
        hum_counts.append(len(meta.humans))
    if obj_counts:
        report.objects_per_scene = (min(obj_counts), max(obj_counts))
        report.humans_per_scene = (min(hum_counts), max(hum_counts))
    return report


def recaption(
    metadata_path: str | Path,
    mode: str | None = None,
    weights: dict[str, float] | None = None,
    seed: int | None = None,
):
    """Re-run the grammar on a stored metadata file.

    Defaults reproduce the originally emitted caption exactly (the statement
    shuffle seed, mode, and weights are stored in the metadata).
    """
    meta: FrameMetadata = load_metadata(metadata_path)
    return compose_caption(
        meta,
        Stream(meta.caption_seed if seed is None else seed),
        mode=mode or meta.caption_mode,
        weights=weights if weights is not None else meta.statement_weights,
    )
