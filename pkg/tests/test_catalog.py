import dataclasses
import json

import pytest

from sceneforge.catalog import (
    ActionSegment,
    Capsule,
    CatalogError,
    demo_catalog_path,
    load_catalog,
    size_class_for_extent,
    validate_catalog,
)


def test_demo_catalog_counts(catalog):
    assert len(catalog.objects) == 12
    assert len(catalog.materials) == 10
    assert len(catalog.colors) == 8
    assert len(catalog.human_templates) == 3
    assert len(catalog.clothing_textures) == 6
    assert len(catalog.motion_clips) == 4
    assert len(catalog.scene_envs) == 3


def test_demo_catalog_validates_clean(catalog):
    assert validate_catalog(catalog).ok


def test_load_is_pure_function_of_bytes(tmp_path):
    data = demo_catalog_path().read_bytes()
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    p1.write_bytes(data)
    p2.write_bytes(data)
    c1, c2 = load_catalog(p1), load_catalog(p2)
    assert c1.objects == c2.objects
    assert c1.motion_clips == c2.motion_clips
    assert c1.source_bytes_sha256 == c2.source_bytes_sha256


def _demo_doc():
    return json.loads(demo_catalog_path().read_text())


def _write(tmp_path, doc):
    p = tmp_path / "catalog.json"
    p.write_text(json.dumps(doc))
    return p


def test_duplicate_object_id_names_offender(tmp_path):
    doc = _demo_doc()
    doc["objects"].append(dict(doc["objects"][0]))
    with pytest.raises(CatalogError, match="chair_01"):
        load_catalog(_write(tmp_path, doc))


def test_dangling_color_reference(tmp_path):
    doc = _demo_doc()
    doc["objects"][0]["default_color"] = "c_999"
    with pytest.raises(CatalogError, match="c_999"):
        load_catalog(_write(tmp_path, doc))


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n "catalog_version": 1,\n "objects": [}\n}')
    with pytest.raises(CatalogError, match=r"line 3"):
        load_catalog(p)


def test_missing_version_rejected(tmp_path):
    doc = _demo_doc()
    del doc["catalog_version"]
    with pytest.raises(CatalogError, match="catalog_version"):
        load_catalog(_write(tmp_path, doc))


def test_validate_flags_motion_gap(catalog):
    clip = catalog.motion_clips[0]
    broken = dataclasses.replace(
        clip,
        action_segments=(
            ActionSegment(start=0, end=50, phrase="walks forward"),
            ActionSegment(start=60, end=clip.n_frames, phrase="walks forward"),
        ),
    )
    bad = dataclasses.replace(catalog, motion_clips=(broken,) + catalog.motion_clips[1:])
    report = validate_catalog(bad)
    assert any("uncovered frames [50,60)" in str(f) for f in report.findings)


def test_validate_flags_zero_radius_collider(catalog):
    tpl = catalog.human_templates[0]
    part = tpl.collider_parts[0]
    broken = dataclasses.replace(
        tpl,
        collider_parts=(Capsule(part.name, part.p0, part.p1, 0.0),) + tpl.collider_parts[1:],
    )
    bad = dataclasses.replace(
        catalog, human_templates=(broken,) + catalog.human_templates[1:]
    )
    report = validate_catalog(bad)
    assert any(part.name in str(f) and "radius" in str(f) for f in report.findings)


def test_validate_flags_trajectory_length(catalog):
    clip = catalog.motion_clips[0]
    broken = dataclasses.replace(clip, root_trajectory=clip.root_trajectory[:-1])
    bad = dataclasses.replace(catalog, motion_clips=(broken,) + catalog.motion_clips[1:])
    assert not validate_catalog(bad).ok


def test_validate_flags_spawn_outside_floor(catalog):
    env = dataclasses.replace(catalog.scene_envs[0], spawn_region=(-10.0, -1.0, 1.0, 1.0))
    bad = dataclasses.replace(catalog, scene_envs=(env,) + catalog.scene_envs[1:])
    report = validate_catalog(bad)
    assert any("spawn_region" in str(f) for f in report.findings)


def test_loaded_catalogs_always_validate(tmp_path):
    # any file load_catalog accepts must have zero findings
    doc = _demo_doc()
    doc["objects"][3]["base_extent"] = [0.5, -0.1, 0.5]
    with pytest.raises(CatalogError):
        load_catalog(_write(tmp_path, doc))


def test_size_class_thresholds():
    assert size_class_for_extent(0.29) == "small"
    assert size_class_for_extent(0.3) == "medium"
    assert size_class_for_extent(0.99) == "medium"
    assert size_class_for_extent(1.0) == "large"


def test_default_material_is_first_of_first_family(catalog):
    chair = catalog.object_by_id("chair_01")  # families: wood, metal
    assert catalog.default_material_for(chair).id == "m_wood"


def test_category_ids_stable_and_include_person(catalog):
    ids = catalog.category_ids()
    assert ids == catalog.category_ids()
    assert "person" in ids
    assert 0 not in ids.values()
    assert len(set(ids.values())) == len(ids)
