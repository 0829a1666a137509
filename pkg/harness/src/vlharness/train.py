"""Fine-tuning loop: frozen base, trainable adapters, contrastive loss.

Captions longer than the tokenizer's context budget are split at sentence
boundaries and encoded as the mean of their chunk embeddings. Images are
optionally stylized before batching. Only adapter parameters receive
gradients; the optimizer is Adam under cosine annealing. The training log
(one JSON object per step: step, loss, lr) is written next to the output
checkpoint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

import copy

from .data import PairDataset, load_image_batch, load_manifest
from .kernels import pack_sentences
from .model import (
    TwoTowerModel,
    add_adapters,
    collapse_adapters,
    load_checkpoint,
    save_checkpoint,
    trainable_parameter_count,
)
from .stylize import augment_image, style_pool, stylize_image


@dataclass
class TrainConfig:
    manifest_path: str
    model_path: str
    out_path: str = "finetuned.pt"
    lora_rank: int = 16
    learning_rate: float = 5e-7
    epochs: int = 6
    batch_size: int = 400
    max_steps: int | None = None
    max_pairs: int | None = None
    stylize: bool = False
    style_alpha: float = 0.5
    augment: bool = False
    averaging_alpha: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.lora_rank < 1:
            raise ValueError("lora_rank must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")


@dataclass
class TrainResult:
    checkpoint_path: Path
    log_path: Path
    log: list[dict] = field(default_factory=list)
    trainable_parameters: int = 0
    adapted_shapes: list[tuple[int, int]] = field(default_factory=list)
    model: TwoTowerModel | None = None  # adapter-path model, pre-collapse

    @property
    def first_loss(self) -> float:
        return self.log[0]["loss"]

    @property
    def final_loss(self) -> float:
        return self.log[-1]["loss"]


def caption_chunks(model: TwoTowerModel, caption: str) -> list[str]:
    tok = model.tokenizer
    return pack_sentences(caption, tok.context_budget, tok.count_tokens)


def encode_captions(model: TwoTowerModel, captions: list[str]) -> torch.Tensor:
    return model.encode_text_chunks([caption_chunks(model, c) for c in captions])


def contrastive_loss(logits: torch.Tensor) -> torch.Tensor:
    labels = torch.arange(logits.shape[0])
    return 0.5 * (
        F.cross_entropy(logits, labels) + F.cross_entropy(logits.t(), labels)
    )


def _prepare_images(cfg: TrainConfig, dataset: PairDataset, samples) -> torch.Tensor:
    images = load_image_batch(samples)
    if cfg.stylize or cfg.augment:
        h, w = images.shape[2], images.shape[3]
        styles = style_pool(len(samples), (h, w), seed=cfg.seed) if cfg.stylize else None
        rng = np.random.default_rng(cfg.seed + 1)
        out = []
        for i, img in enumerate(images):
            if cfg.stylize:
                img = stylize_image(img, styles[i], cfg.style_alpha)
            if cfg.augment:
                img = augment_image(img, rng)
            out.append(img)
        images = np.stack(out)
    return torch.from_numpy(np.ascontiguousarray(images)).float()


def pretrain_checkpoint(
    out_path: str | Path,
    manifest_path: str | Path,
    steps: int = 150,
    learning_rate: float = 3e-3,
    batch_size: int = 32,
    seed: int = 0,
) -> Path:
    """Contrastively pretrain the full tiny model and save it as the source.

    This stands in for a downloaded pretrained checkpoint: all parameters
    train (no adapters), so the saved model is a meaningful base for the
    adapter-only fine-tuning stage.
    """
    dataset = load_manifest(manifest_path)
    torch.manual_seed(seed)
    model = TwoTowerModel()
    optimizer = torch.optim.Adam(model.parameters(), lr=learning_rate)
    rng = np.random.default_rng(seed)
    for _ in range(steps):
        idx = rng.permutation(len(dataset.samples))[:batch_size]
        batch = [dataset.samples[i] for i in idx]
        images = torch.from_numpy(load_image_batch(batch)).float()
        text_emb = encode_captions(model, [s.caption for s in batch])
        loss = contrastive_loss(model.logits(model.encode_images(images), text_emb))
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
    out_path = Path(out_path)
    save_checkpoint(out_path, model, {"kind": "source", "pretrain_steps": steps})
    return out_path


def finetune(cfg: TrainConfig) -> TrainResult:
    dataset = load_manifest(cfg.manifest_path)
    samples = dataset.samples[: cfg.max_pairs] if cfg.max_pairs else dataset.samples

    model = load_checkpoint(cfg.model_path)
    adapted_shapes = add_adapters(model, cfg.lora_rank, seed=cfg.seed)
    trainable = [p for p in model.parameters() if p.requires_grad]

    torch.manual_seed(cfg.seed)
    order_rng = np.random.default_rng(cfg.seed)

    steps_per_epoch = max(1, math.ceil(len(samples) / cfg.batch_size))
    total_steps = steps_per_epoch * cfg.epochs
    if cfg.max_steps is not None:
        total_steps = min(total_steps, cfg.max_steps)

    optimizer = torch.optim.Adam(trainable, lr=cfg.learning_rate)
    scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, T_max=total_steps)

    # image batches are deterministic per epoch; cache tensors by index tuple
    log: list[dict] = []
    step = 0
    done = False
    for _epoch in range(cfg.epochs):
        if done:
            break
        order = order_rng.permutation(len(samples))
        for start in range(0, len(samples), cfg.batch_size):
            batch_idx = order[start : start + cfg.batch_size]
            if len(batch_idx) < 2:
                continue
            batch = [samples[i] for i in batch_idx]
            images = _prepare_images(cfg, dataset, batch)
            captions = [s.caption for s in batch]

            image_emb = model.encode_images(images)
            text_emb = encode_captions(model, captions)
            loss = contrastive_loss(model.logits(image_emb, text_emb))

            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            scheduler.step()

            log.append(
                {
                    "step": step,
                    "loss": float(loss.detach()),
                    "lr": float(scheduler.get_last_lr()[0]),
                }
            )
            step += 1
            if step >= total_steps:
                done = True
                break

    # the written checkpoint is the collapsed model (plain Linear weights,
    # loadable by TwoTowerModel); adapters fold in before averaging
    out_path = Path(cfg.out_path)
    collapsed = copy.deepcopy(model)
    collapse_adapters(collapsed)
    save_checkpoint(out_path, collapsed, {"kind": "finetuned", "rank": cfg.lora_rank})
    log_path = out_path.with_suffix(".log.json")
    log_path.write_text(json.dumps(log, indent=1) + "\n", "utf-8")
    return TrainResult(
        checkpoint_path=out_path,
        log_path=log_path,
        log=log,
        trainable_parameters=trainable_parameter_count(model),
        adapted_shapes=adapted_shapes,
        model=model,
    )
