"""Weight-space averaging of checkpoints and retrieval probing.

Interpolation follows the source-weight convention: alpha multiplies the
source (pre-fine-tune) weights, 1 - alpha the fine-tuned weights. Both
checkpoints must be collapsed (plain Linear) state dicts.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch

from .data import load_image_batch, load_manifest
from .model import TwoTowerModel, load_checkpoint
from .train import encode_captions


def interpolate_checkpoints(src: TwoTowerModel, ft: TwoTowerModel, alpha: float) -> TwoTowerModel:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    src_state = src.state_dict()
    ft_state = ft.state_dict()
    if src_state.keys() != ft_state.keys():
        raise ValueError("checkpoints are not shape-compatible")
    merged = {}
    for key, src_t in src_state.items():
        ft_t = ft_state[key]
        if src_t.shape != ft_t.shape:
            raise ValueError(f"shape mismatch at {key}: {src_t.shape} vs {ft_t.shape}")
        merged[key] = alpha * src_t + (1.0 - alpha) * ft_t
    model = TwoTowerModel()
    model.load_state_dict(merged)
    return model


@torch.no_grad()
def retrieval_accuracy(model: TwoTowerModel, images: torch.Tensor, captions: list[str]) -> float:
    """Top-1 image-to-text retrieval accuracy over a probe set."""
    model.eval()
    image_emb = model.encode_images(images)
    text_emb = encode_captions(model, captions)
    logits = model.logits(image_emb, text_emb)
    predicted = logits.argmax(dim=1)
    target = torch.arange(len(captions))
    return float((predicted == target).float().mean())


@dataclass
class AveragingReport:
    scores: dict[float, float]  # alpha -> image-to-text accuracy
    probe_size: int


def average_and_eval(
    src_path: str | Path,
    ft_path: str | Path,
    manifest_path: str | Path,
    alphas: tuple[float, ...] = (0.0, 0.5, 1.0),
    probe_size: int = 64,
) -> AveragingReport:
    src = load_checkpoint(src_path)
    ft = load_checkpoint(ft_path)
    dataset = load_manifest(manifest_path)
    probe = dataset.samples[-probe_size:]
    images = torch.from_numpy(load_image_batch(probe)).float()
    captions = [s.caption for s in probe]
    scores = {}
    for alpha in alphas:
        merged = interpolate_checkpoints(src, ft, alpha)
        scores[alpha] = retrieval_accuracy(merged, images, captions)
    return AveragingReport(scores=scores, probe_size=len(probe))
