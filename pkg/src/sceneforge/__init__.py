"""sceneforge: deterministic synthetic scenes, dense captions, and VL math kernels."""

from .catalog import AssetCatalog, demo_catalog_path, load_catalog, validate_catalog
from .config import GenerationConfig, load_config
from .grammar import build_paraphrase_prompt, compose_caption
from .pipeline import dataset_stats, generate_dataset, recaption
from .raster import pixel_coverage, rasterize_frame
from .relations import extract_relations
from .rng import Stream, derive_seed
from .sampler import advance_frame, sample_scene, settle_physics

__version__ = "0.1.0"

__all__ = [
    "AssetCatalog",
    "GenerationConfig",
    "Stream",
    "advance_frame",
    "build_paraphrase_prompt",
    "compose_caption",
    "dataset_stats",
    "demo_catalog_path",
    "derive_seed",
    "extract_relations",
    "generate_dataset",
    "load_catalog",
    "load_config",
    "pixel_coverage",
    "rasterize_frame",
    "recaption",
    "sample_scene",
    "settle_physics",
    "validate_catalog",
]
