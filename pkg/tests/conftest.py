import pytest

from sceneforge.catalog import demo_catalog_path, load_catalog
from sceneforge.config import GenerationConfig
from sceneforge.rng import Stream, derive_seed
from sceneforge.sampler import sample_scene, settle_physics


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(demo_catalog_path())


@pytest.fixture
def quick_config():
    return GenerationConfig(
        seed=7,
        n_videos=1,
        frames_per_video=4,
        n_object_range=(2, 4),
        n_human_range=(1, 2),
        image_size=(64, 64),
    )


def make_settled_scene(catalog, seed: int, config: GenerationConfig | None = None, video: int = 0):
    """Deterministic settled scene; steps to the next video on the rare
    placement rejection (the pipeline skips such scenes the same way)."""
    from sceneforge.sampler import PlacementError

    config = config or GenerationConfig(
        seed=seed, frames_per_video=4, image_size=(64, 64)
    )
    for v in range(video, video + 8):
        stream = Stream(derive_seed(seed, f"video:{v}"))
        try:
            return settle_physics(sample_scene(config, catalog, stream, scene_id=f"v{v}"))
        except PlacementError:
            continue
    raise AssertionError(f"8 consecutive placement rejections for seed {seed}")
