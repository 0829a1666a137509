"""SVCW binary serialization and the cross-checking fixture exporter.

Layout (all integers little-endian uint32, all floats little-endian float32):

    magic  b"SVCW"
    kind   1 = matrix | 2 = adapter | 3 = tensor
    kind 1: m, l, then m*l values row-major
    kind 2: m, l, r, then A (m*r values), then B (r*l values)
    kind 3: ndim, dims[ndim], then prod(dims) values row-major

The fixture exporter writes an ``index.json`` plus SVCW files with recorded
expected outputs for lora_collapse, average_weights, adain_transfer, and
split_caption, so an independent consumer can re-run each op and compare
within 1e-5.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .ftkernels import LoraAdapter, adain_transfer, average_weights, lora_collapse, split_caption
from .rng import Stream

MAGIC = b"SVCW"
KIND_MATRIX = 1
KIND_ADAPTER = 2
KIND_TENSOR = 3

FIXTURE_TOLERANCE = 1e-5


class SvcwError(Exception):
    pass


def write_matrix(path: str | Path, matrix) -> None:
    m = np.asarray(matrix, dtype=np.float32)
    if m.ndim != 2:
        raise SvcwError(f"matrix must be 2-D, got shape {m.shape}")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", KIND_MATRIX, m.shape[0], m.shape[1]))
        f.write(m.astype("<f4").tobytes())


def write_adapter(path: str | Path, adapter: LoraAdapter) -> None:
    m, l = adapter.shape
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IIII", KIND_ADAPTER, m, l, adapter.rank))
        f.write(adapter.a.astype("<f4").tobytes())
        f.write(adapter.b.astype("<f4").tobytes())


def write_tensor(path: str | Path, tensor) -> None:
    t = np.asarray(tensor, dtype=np.float32)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", KIND_TENSOR, t.ndim))
        f.write(struct.pack(f"<{t.ndim}I", *t.shape))
        f.write(t.astype("<f4").tobytes())


def _read_header(f, path):
    magic = f.read(4)
    if magic != MAGIC:
        raise SvcwError(f"{path}: bad magic {magic!r}")
    (kind,) = struct.unpack("<I", f.read(4))
    return kind


def read_any(path: str | Path):
    """Returns an ndarray (matrix/tensor) or a LoraAdapter."""
    path = Path(path)
    with open(path, "rb") as f:
        kind = _read_header(f, path)
        if kind == KIND_MATRIX:
            m, l = struct.unpack("<II", f.read(8))
            data = np.frombuffer(f.read(4 * m * l), dtype="<f4")
            if data.size != m * l:
                raise SvcwError(f"{path}: truncated matrix payload")
            return data.reshape(m, l).astype(np.float64)
        if kind == KIND_ADAPTER:
            m, l, r = struct.unpack("<III", f.read(12))
            a = np.frombuffer(f.read(4 * m * r), dtype="<f4").reshape(m, r)
            b = np.frombuffer(f.read(4 * r * l), dtype="<f4")
            if b.size != r * l:
                raise SvcwError(f"{path}: truncated adapter payload")
            return LoraAdapter(a=a.astype(np.float64), b=b.reshape(r, l).astype(np.float64))
        if kind == KIND_TENSOR:
            (ndim,) = struct.unpack("<I", f.read(4))
            dims = struct.unpack(f"<{ndim}I", f.read(4 * ndim))
            n = int(np.prod(dims))
            data = np.frombuffer(f.read(4 * n), dtype="<f4")
            if data.size != n:
                raise SvcwError(f"{path}: truncated tensor payload")
            return data.reshape(dims).astype(np.float64)
    raise SvcwError(f"{path}: unknown kind {kind}")


def _rand_matrix(stream: Stream, m: int, l: int) -> np.ndarray:
    return np.array(
        [[stream.uniform(-1.0, 1.0) for _ in range(l)] for _ in range(m)]
    )


def export_fixtures(out_dir: str | Path, seed: int = 2024) -> Path:
    """Write the SVCW fixture set; returns the index path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stream = Stream(seed)
    cases = []

    for i, (m, l, r) in enumerate([(8, 5, 2), (24, 16, 4), (64, 48, 16)]):
        name = f"lora_collapse_{i}"
        sub = stream.derive(name)
        w = _rand_matrix(sub, m, l)
        adapter = LoraAdapter(a=_rand_matrix(sub, m, r), b=_rand_matrix(sub, r, l))
        # expected values recomputed from the float32 round trip the consumer sees
        write_matrix(out / f"{name}_w.svcw", w)
        write_adapter(out / f"{name}_ad.svcw", adapter)
        w32 = read_any(out / f"{name}_w.svcw")
        ad32 = read_any(out / f"{name}_ad.svcw")
        write_matrix(out / f"{name}_out.svcw", lora_collapse(w32, ad32))
        cases.append(
            {
                "op": "lora_collapse",
                "name": name,
                "inputs": {"w": f"{name}_w.svcw", "adapter": f"{name}_ad.svcw"},
                "expected": f"{name}_out.svcw",
            }
        )

    for i, alpha in enumerate([0.0, 0.5, 1.0, 0.25]):
        name = f"average_weights_{i}"
        sub = stream.derive(name)
        src = _rand_matrix(sub, 12, 9)
        ft = _rand_matrix(sub, 12, 9)
        write_matrix(out / f"{name}_src.svcw", src)
        write_matrix(out / f"{name}_ft.svcw", ft)
        src32 = read_any(out / f"{name}_src.svcw")
        ft32 = read_any(out / f"{name}_ft.svcw")
        write_matrix(out / f"{name}_out.svcw", average_weights(src32, ft32, alpha))
        cases.append(
            {
                "op": "average_weights",
                "name": name,
                "inputs": {
                    "src": f"{name}_src.svcw",
                    "ft": f"{name}_ft.svcw",
                    "alpha": alpha,
                },
                "expected": f"{name}_out.svcw",
            }
        )

    for i, (shape_c, shape_s, alpha) in enumerate(
        [((3, 8, 10), (3, 6, 6), 0.5), ((3, 12, 7), (3, 12, 7), 1.0), ((4, 5, 5), (4, 9, 4), 0.3)]
    ):
        name = f"adain_transfer_{i}"
        sub = stream.derive(name)
        content = np.array(
            [[[sub.uniform(0.0, 1.0) for _ in range(shape_c[2])] for _ in range(shape_c[1])] for _ in range(shape_c[0])]
        )
        style = np.array(
            [[[sub.uniform(0.0, 1.0) for _ in range(shape_s[2])] for _ in range(shape_s[1])] for _ in range(shape_s[0])]
        )
        write_tensor(out / f"{name}_content.svcw", content)
        write_tensor(out / f"{name}_style.svcw", style)
        c32 = read_any(out / f"{name}_content.svcw")
        s32 = read_any(out / f"{name}_style.svcw")
        write_tensor(out / f"{name}_out.svcw", adain_transfer(c32, s32, alpha))
        cases.append(
            {
                "op": "adain_transfer",
                "name": name,
                "inputs": {
                    "content": f"{name}_content.svcw",
                    "style": f"{name}_style.svcw",
                    "alpha": alpha,
                },
                "expected": f"{name}_out.svcw",
            }
        )

    texts = [
        "This scene contains a chair, and 0 humans. They are in a sunlit office with large windows.",
        " ".join(
            f"A {w} box is to the left of a {v} lamp."
            for w, v in [("red", "blue"), ("green", "white"), ("small", "large"), ("oak", "steel")]
        ),
        "One. Two three. Four five six? Seven eight nine ten! Eleven twelve thirteen fourteen fifteen.",
    ]
    for i, (text, budget) in enumerate(zip(texts, [12, 23, 6])):
        name = f"split_caption_{i}"
        cases.append(
            {
                "op": "split_caption",
                "name": name,
                "inputs": {"text": text, "budget": budget, "tokenizer": "whitespace"},
                "expected_chunks": split_caption(text, budget),
            }
        )

    index = {
        "format": "svcw-fixtures-v1",
        "tolerance": FIXTURE_TOLERANCE,
        "seed": seed,
        "cases": cases,
    }
    index_path = out / "index.json"
    index_path.write_text(json.dumps(index, indent=1, sort_keys=True) + "\n", "utf-8")
    return index_path
