"""vlharness: LoRA fine-tuning harness for generated image-caption datasets."""

from .average import average_and_eval, interpolate_checkpoints, retrieval_accuracy
from .data import load_manifest, read_ppm
from .fixtures import verify_kernel_fixtures
from .model import (
    TwoTowerModel,
    add_adapters,
    collapse_adapters,
    init_checkpoint,
    load_checkpoint,
)
from .train import TrainConfig, finetune, pretrain_checkpoint

__version__ = "0.1.0"

__all__ = [
    "TrainConfig",
    "TwoTowerModel",
    "add_adapters",
    "average_and_eval",
    "collapse_adapters",
    "finetune",
    "init_checkpoint",
    "interpolate_checkpoints",
    "load_checkpoint",
    "load_manifest",
    "pretrain_checkpoint",
    "read_ppm",
    "retrieval_accuracy",
    "verify_kernel_fixtures",
]
