import numpy as np
import pytest

from vlharness.data import DatasetError, load_manifest, read_ppm


def test_read_ppm_bytes(tmp_path):
    path = tmp_path / "img.ppm"
    pixels = bytes([0, 0, 0, 255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255, 128, 128, 128])
    path.write_bytes(b"P6\n3 2\n255\n" + pixels)
    img = read_ppm(path)
    assert img.shape == (3, 2, 3)
    assert img[:, 0, 0].tolist() == [0.0, 0.0, 0.0]
    assert img[0, 0, 1] == 1.0 and img[1, 0, 1] == 0.0
    assert np.allclose(img[:, 1, 2], 128 / 255)


def test_read_ppm_rejects_other_formats(tmp_path):
    path = tmp_path / "img.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes(4))
    with pytest.raises(DatasetError):
        read_ppm(path)


def test_load_manifest(finetune_manifest):
    ds = load_manifest(finetune_manifest)
    assert len(ds) == 1008
    assert ds.header["counts"]["samples"] == 1008
    sample = ds.samples[0]
    assert sample.caption.startswith("This scene contains")
    img = read_ppm(sample.image_path)
    assert img.shape == (3, 64, 64)
    assert 0.0 <= img.min() and img.max() <= 1.0


def test_load_manifest_missing(tmp_path):
    with pytest.raises(DatasetError):
        load_manifest(tmp_path / "none.jsonl")


def test_load_manifest_bad_record(tmp_path):
    bad = tmp_path / "manifest.jsonl"
    bad.write_text('{"sample_id": "x"}\n')
    with pytest.raises(DatasetError):
        load_manifest(bad)
