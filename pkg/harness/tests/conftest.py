import json
import subprocess
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
DEMO_CATALOG = REPO_ROOT / "src" / "sceneforge" / "data" / "demo_catalog.json"


def _generate(out: Path, seed: int, videos: int) -> Path:
    """Drive the generator through its CLI (the external interface)."""
    cfg = out.parent / f"cfg_{seed}.json"
    cfg.write_text(
        json.dumps(
            {
                "seed": seed,
                "n_videos": videos,
                "frames_per_video": 4,
                "viewpoints_per_frame": 4,
                "image_size": [64, 64],
            }
        )
    )
    subprocess.run(
        [
            "forge", "generate",
            "--config", str(cfg),
            "--catalog", str(DEMO_CATALOG),
            "--out", str(out),
            "--workers", "2",
        ],
        check=True,
        capture_output=True,
    )
    return out / "manifest.jsonl"


@pytest.fixture(scope="session")
def finetune_manifest(tmp_path_factory) -> Path:
    """1008 image-caption pairs for the fine-tuning stage."""
    out = tmp_path_factory.mktemp("ft_ds")
    return _generate(out, seed=4242, videos=63)


@pytest.fixture(scope="session")
def pretrain_manifest(tmp_path_factory) -> Path:
    """A differently-seeded corpus standing in for pretraining data."""
    out = tmp_path_factory.mktemp("pre_ds")
    return _generate(out, seed=777, videos=40)


@pytest.fixture(scope="session")
def source_checkpoint(tmp_path_factory, pretrain_manifest) -> Path:
    from vlharness import pretrain_checkpoint

    out = tmp_path_factory.mktemp("ckpt") / "source.pt"
    return pretrain_checkpoint(out, pretrain_manifest, steps=150, seed=0)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("svcw_fixtures")
    subprocess.run(
        ["forge", "fixtures", "--out", str(out)], check=True, capture_output=True
    )
    return out
