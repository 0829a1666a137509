"""Cross-implementation verification against the generator's SVCW fixtures.

Reads the fixture index and binary files, recomputes each operation with this
package's own kernels, and compares to the recorded expected outputs within
the index tolerance. The SVCW reader here is an independent implementation
of the published layout (magic "SVCW", little-endian uint32 header fields,
float32 payload; kinds: 1 matrix, 2 adapter, 3 tensor).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .kernels import (
    collapse_low_rank,
    interpolate_weights,
    pack_sentences,
    statistic_transfer,
)


class FixtureError(Exception):
    pass


def read_svcw(path: str | Path):
    raw = Path(path).read_bytes()
    if raw[:4] != b"SVCW":
        raise FixtureError(f"{path}: bad magic {raw[:4]!r}")
    (kind,) = struct.unpack_from("<I", raw, 4)
    if kind == 1:
        m, l = struct.unpack_from("<II", raw, 8)
        data = np.frombuffer(raw, dtype="<f4", count=m * l, offset=16)
        if data.size != m * l:
            raise FixtureError(f"{path}: truncated matrix")
        return data.reshape(m, l).astype(np.float64)
    if kind == 2:
        m, l, r = struct.unpack_from("<III", raw, 8)
        a = np.frombuffer(raw, dtype="<f4", count=m * r, offset=20)
        b = np.frombuffer(raw, dtype="<f4", count=r * l, offset=20 + 4 * m * r)
        if a.size != m * r or b.size != r * l:
            raise FixtureError(f"{path}: truncated adapter")
        return a.reshape(m, r).astype(np.float64), b.reshape(r, l).astype(np.float64)
    if kind == 3:
        (ndim,) = struct.unpack_from("<I", raw, 8)
        dims = struct.unpack_from(f"<{ndim}I", raw, 12)
        count = int(np.prod(dims))
        data = np.frombuffer(raw, dtype="<f4", count=count, offset=12 + 4 * ndim)
        if data.size != count:
            raise FixtureError(f"{path}: truncated tensor")
        return data.reshape(dims).astype(np.float64)
    raise FixtureError(f"{path}: unknown kind {kind}")


@dataclass
class FixtureReport:
    passed: list[str] = field(default_factory=list)
    failed: list[tuple[str, str]] = field(default_factory=list)  # (case, reason)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed

    def summary(self) -> str:
        lines = [f"{len(self.passed)} passed, {len(self.failed)} failed"]
        lines += [f"FAIL {name}: {reason}" for name, reason in self.failed]
        lines += [f"WARN {w}" for w in self.warnings]
        return "\n".join(lines)


def _whitespace_tokens(text: str) -> int:
    return len(text.split())


def verify_kernel_fixtures(fixture_dir: str | Path) -> FixtureReport:
    """Recompute every fixture case and compare to the recorded outputs."""
    fixture_dir = Path(fixture_dir)
    report = FixtureReport()
    index_path = fixture_dir / "index.json"
    if not index_path.is_file():
        report.warnings.append(f"no index.json in {fixture_dir}; vacuous pass")
        return report
    try:
        index = json.loads(index_path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise FixtureError(f"{index_path}: {exc.msg} (line {exc.lineno})") from exc
    tolerance = float(index.get("tolerance", 1e-5))

    for case in index.get("cases", []):
        name = case.get("name", "?")
        op = case.get("op", "?")
        ins = case.get("inputs", {})
        try:
            if op == "lora_collapse":
                w = read_svcw(fixture_dir / ins["w"])
                a, b = read_svcw(fixture_dir / ins["adapter"])
                got = collapse_low_rank(w, a, b)
                expected = read_svcw(fixture_dir / case["expected"])
            elif op == "average_weights":
                got = interpolate_weights(
                    read_svcw(fixture_dir / ins["src"]),
                    read_svcw(fixture_dir / ins["ft"]),
                    float(ins["alpha"]),
                )
                expected = read_svcw(fixture_dir / case["expected"])
            elif op == "adain_transfer":
                got = statistic_transfer(
                    read_svcw(fixture_dir / ins["content"]),
                    read_svcw(fixture_dir / ins["style"]),
                    float(ins["alpha"]),
                )
                expected = read_svcw(fixture_dir / case["expected"])
            elif op == "split_caption":
                chunks = pack_sentences(ins["text"], int(ins["budget"]), _whitespace_tokens)
                if chunks != case["expected_chunks"]:
                    report.failed.append((name, f"{op}: chunking differs: {chunks}"))
                else:
                    report.passed.append(name)
                continue
            else:
                report.failed.append((name, f"unknown op '{op}'"))
                continue
        except (FixtureError, OSError, KeyError, ValueError) as exc:
            report.failed.append((name, f"{op}: {exc}"))
            continue
        err = float(np.abs(got - expected).max()) if got.shape == expected.shape else np.inf
        if got.shape != expected.shape:
            report.failed.append((name, f"{op}: shape {got.shape} vs {expected.shape}"))
        elif err > tolerance:
            report.failed.append((name, f"{op}: max abs error {err:.3g} > {tolerance}"))
        else:
            report.passed.append(name)

    if not report.passed and not report.failed:
        report.warnings.append("fixture index contained no cases; vacuous pass")
    return report
