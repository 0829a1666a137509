import dataclasses
import json
import os
import stat

import pytest

from sceneforge.catalog import demo_catalog_path, load_catalog
from sceneforge.config import GenerationConfig
from sceneforge.pipeline import (
    GenerationAbort,
    dataset_stats,
    generate_dataset,
    read_manifest,
    recaption,
)


def small_config(**overrides):
    base = dict(
        seed=11,
        n_videos=2,
        frames_per_video=3,
        viewpoints_per_frame=4,
        n_object_range=(2, 4),
        n_human_range=(1, 2),
        image_size=(64, 64),
    )
    base.update(overrides)
    return GenerationConfig(**base)


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    catalog = load_catalog(demo_catalog_path())
    out = tmp_path_factory.mktemp("ds")
    manifest = generate_dataset(small_config(), catalog, out)
    return out, manifest


def test_record_count_arithmetic(dataset):
    _, manifest = dataset
    # 2 videos x 3 frames x 4 viewpoints
    assert len(manifest.records) == 24
    assert manifest.header["counts"]["samples"] == 24


def test_all_referenced_files_exist(dataset):
    out, manifest = dataset
    for record in manifest.records:
        for key in ("rgb", "depth", "instance_mask", "category_mask", "metadata"):
            assert (out / record[key]).is_file(), record[key]


def test_manifest_header_digests(dataset, catalog):
    out, manifest = dataset
    header = json.loads((out / "manifest_header.json").read_text())
    assert header["catalog_digest"] == catalog.source_bytes_sha256
    assert header["format_version"] == 1
    assert len(header["config_digest"]) == 64
    assert header["category_ids"] == catalog.category_ids()


def test_every_caption_derives_from_its_metadata(dataset):
    # manifest completeness: the stored caption is exactly what the stored
    # metadata (with its stored shuffle seed) composes to
    out, manifest = dataset
    for record in manifest.records:
        assert record["caption"].startswith("This scene contains")
        assert recaption(out / record["metadata"]).full_text == record["caption"]


def test_repeat_run_byte_identical(tmp_path, catalog):
    cfg = small_config(n_videos=1)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    generate_dataset(cfg, catalog, out_a)
    generate_dataset(cfg, catalog, out_b)
    files_a = sorted(p.relative_to(out_a) for p in out_a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(out_b) for p in out_b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert (out_a / rel).read_bytes() == (out_b / rel).read_bytes(), rel


def test_parallel_workers_same_output(tmp_path, catalog):
    cfg = small_config(n_videos=3, frames_per_video=2)
    out_a, out_b = tmp_path / "serial", tmp_path / "parallel"
    generate_dataset(cfg, catalog, out_a, workers=1)
    generate_dataset(cfg, catalog, out_b, workers=2)
    files_a = sorted(p.relative_to(out_a) for p in out_a.rglob("*") if p.is_file())
    for rel in files_a:
        assert (out_a / rel).read_bytes() == (out_b / rel).read_bytes(), rel


def test_unwritable_out_dir_fails_before_sampling(tmp_path, catalog):
    if os.geteuid() == 0:
        pytest.skip("permission bits are ignored when running as root")
    out = tmp_path / "ro"
    out.mkdir()
    out.chmod(stat.S_IRUSR | stat.S_IXUSR)
    with pytest.raises(PermissionError):
        generate_dataset(small_config(), catalog, out)


def test_recaption_reproduces_stored_caption(dataset):
    out, manifest = dataset
    for record in manifest.records[:6]:
        doc = recaption(out / record["metadata"])
        assert doc.full_text == record["caption"]


def test_recaption_zero_relation_weight(dataset):
    out, manifest = dataset
    doc = recaption(
        out / manifest.records[0]["metadata"],
        mode="sampled",
        weights={"relation": 0.0},
    )
    assert all(cat != "relation" for cat, _ in doc.statements)


def test_stats_totals(dataset):
    out, manifest = dataset
    report = dataset_stats(out / "manifest.jsonl")
    assert report.samples == len(manifest.records)
    assert report.predicates.get("left_of", 0) == report.predicates.get("right_of", 0)
    assert report.predicates.get("in_front_of", 0) == report.predicates.get("behind", 0)
    assert not report.missing_files
    text = report.to_text()
    assert "samples: 24" in text


def test_stats_missing_files_not_fatal(tmp_path, catalog):
    cfg = small_config(n_videos=1)
    out = tmp_path / "ds"
    manifest = generate_dataset(cfg, catalog, out)
    victim = out / manifest.records[0]["metadata"]
    victim.unlink()
    report = dataset_stats(out / "manifest.jsonl")
    assert report.missing_files == [manifest.records[0]["metadata"]]


def test_abort_when_too_many_videos_fail(tmp_path, catalog):
    # shrink every spawn region so no object can be placed
    tiny_envs = tuple(
        dataclasses.replace(env, spawn_region=(-0.01, -0.01, 0.01, 0.01))
        for env in catalog.scene_envs
    )
    broken = dataclasses.replace(catalog, scene_envs=tiny_envs)
    with pytest.raises(GenerationAbort):
        generate_dataset(small_config(), broken, tmp_path / "fail")


def test_read_manifest_round_trip(dataset):
    out, manifest = dataset
    loaded = read_manifest(out / "manifest.jsonl")
    assert loaded.records == manifest.records
    assert loaded.header["counts"] == manifest.header["counts"]


def test_manifest_written_after_samples(dataset):
    out, _ = dataset
    manifest_mtime = (out / "manifest.jsonl").stat().st_mtime_ns
    for sample in (out / "videos").rglob("*.ppm"):
        assert sample.stat().st_mtime_ns <= manifest_mtime


def test_worker_env_default(monkeypatch):
    from sceneforge.pipeline import default_workers

    monkeypatch.delenv("FORGE_WORKERS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("FORGE_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("FORGE_WORKERS", "junk")
    assert default_workers() == 1


def test_empty_manifest_all_zero_report(tmp_path):
    (tmp_path / "manifest.jsonl").write_text("")
    report = dataset_stats(tmp_path / "manifest.jsonl")
    assert report.samples == 0
    assert not report.colors and not report.predicates and not report.actions
    assert report.objects_per_scene is None
