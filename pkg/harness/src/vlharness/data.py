"""Readers for the generated dataset: manifest JSONL + header, PPM images.

This package talks to the generator only through its on-disk formats; nothing
here imports the generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetError(Exception):
    pass


@dataclass
class Sample:
    sample_id: str
    image_path: Path
    caption: str


@dataclass
class PairDataset:
    root: Path
    header: dict
    samples: list[Sample]

    def __len__(self) -> int:
        return len(self.samples)


def load_manifest(manifest_path: str | Path) -> PairDataset:
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.jsonl"
    if not manifest_path.is_file():
        raise DatasetError(f"manifest not found: {manifest_path}")
    root = manifest_path.parent
    header_path = root / "manifest_header.json"
    header = json.loads(header_path.read_text("utf-8")) if header_path.is_file() else {}
    samples = []
    with open(manifest_path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                samples.append(
                    Sample(
                        sample_id=rec["sample_id"],
                        image_path=root / rec["rgb"],
                        caption=rec["caption"],
                    )
                )
            except (json.JSONDecodeError, KeyError) as exc:
                raise DatasetError(f"{manifest_path}:{line_no}: bad record ({exc})") from exc
    if not samples:
        raise DatasetError(f"{manifest_path}: empty manifest")
    return PairDataset(root=root, header=header, samples=samples)


def read_ppm(path: str | Path) -> np.ndarray:
    """Binary P6 image as float32 (3, H, W) in [0, 1]."""
    raw = Path(path).read_bytes()
    if not raw.startswith(b"P6"):
        raise DatasetError(f"{path}: not a binary PPM")
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while raw[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(raw[start:pos]))
    pos += 1  # single whitespace after maxval
    w, h, maxval = fields
    data = np.frombuffer(raw, dtype=np.uint8, count=w * h * 3, offset=pos)
    img = data.reshape(h, w, 3).astype(np.float32) / float(maxval)
    return np.transpose(img, (2, 0, 1))


def load_image_batch(samples: list[Sample]) -> np.ndarray:
    return np.stack([read_ppm(s.image_path) for s in samples])
