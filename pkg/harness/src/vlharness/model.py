"""A small two-tower contrastive model with low-rank adapters.

The towers are deliberately tiny (hash-bucket token embeddings + MLP text
side, strided convs + linear image side) so the full recipe runs on CPU in
seconds. LoRA wrapping covers every nn.Linear in both towers: the wrapped
base weight is frozen, A starts gaussian, B starts zero, so the adapted model
initially computes exactly the base model. ``collapse_adapters`` folds A@B
back into plain Linears for inference parity checks.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from pathlib import Path

import torch
import torch.nn as nn
import torch.nn.functional as F

VOCAB_SIZE = 4096
TEXT_WIDTH = 64
EMBED_DIM = 32
CONTEXT_BUDGET = 77

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class Tokenizer:
    """Lowercase word tokens hashed into a fixed bucket vocabulary."""

    def __init__(self, vocab_size: int = VOCAB_SIZE, context_budget: int = CONTEXT_BUDGET):
        self.vocab_size = vocab_size
        self.context_budget = context_budget

    def tokenize(self, text: str) -> list[int]:
        ids = []
        for word in _TOKEN_RE.findall(text.lower()):
            digest = hashlib.blake2s(word.encode("utf-8"), digest_size=4).digest()
            ids.append(int.from_bytes(digest, "little") % self.vocab_size)
        return ids

    def count_tokens(self, text: str) -> int:
        return len(self.tokenize(text))


class TextTower(nn.Module):
    def __init__(self):
        super().__init__()
        self.embed = nn.Embedding(VOCAB_SIZE + 1, TEXT_WIDTH, padding_idx=VOCAB_SIZE)
        self.fc1 = nn.Linear(TEXT_WIDTH, TEXT_WIDTH)
        self.fc2 = nn.Linear(TEXT_WIDTH, TEXT_WIDTH)
        self.proj = nn.Linear(TEXT_WIDTH, EMBED_DIM)

    def forward(self, tokens: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        x = self.embed(tokens)
        denom = mask.sum(dim=1, keepdim=True).clamp(min=1.0)
        pooled = (x * mask.unsqueeze(-1)).sum(dim=1) / denom
        h = F.gelu(self.fc1(pooled))
        h = F.gelu(self.fc2(h))
        return self.proj(h)


class ImageTower(nn.Module):
    def __init__(self):
        super().__init__()
        self.conv = nn.Sequential(
            nn.Conv2d(3, 16, 3, stride=2, padding=1),
            nn.GELU(),
            nn.Conv2d(16, 32, 3, stride=2, padding=1),
            nn.GELU(),
            nn.Conv2d(32, 64, 3, stride=2, padding=1),
            nn.GELU(),
            nn.AdaptiveAvgPool2d(1),
        )
        self.fc = nn.Linear(64, TEXT_WIDTH)
        self.proj = nn.Linear(TEXT_WIDTH, EMBED_DIM)

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        h = self.conv(images).flatten(1)
        h = F.gelu(self.fc(h))
        return self.proj(h)


class TwoTowerModel(nn.Module):
    def __init__(self):
        super().__init__()
        self.text = TextTower()
        self.image = ImageTower()
        self.logit_scale = nn.Parameter(torch.tensor(math.log(1.0 / 0.07)))
        self.tokenizer = Tokenizer()

    def encode_text_chunks(self, chunk_lists: list[list[str]]) -> torch.Tensor:
        """Mean of per-chunk embeddings for each caption (plain mean)."""
        flat = [c for chunks in chunk_lists for c in chunks]
        token_lists = [self.tokenizer.tokenize(c) for c in flat]
        longest = max((len(t) for t in token_lists), default=1)
        tokens = torch.full((len(flat), max(longest, 1)), VOCAB_SIZE, dtype=torch.long)
        mask = torch.zeros((len(flat), max(longest, 1)))
        for i, ids in enumerate(token_lists):
            tokens[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
            mask[i, : len(ids)] = 1.0
        flat_emb = self.text(tokens, mask)
        out = []
        cursor = 0
        for chunks in chunk_lists:
            out.append(flat_emb[cursor : cursor + len(chunks)].mean(dim=0))
            cursor += len(chunks)
        return torch.stack(out)

    def encode_images(self, images: torch.Tensor) -> torch.Tensor:
        return self.image(images)

    def logits(self, image_emb: torch.Tensor, text_emb: torch.Tensor) -> torch.Tensor:
        img = F.normalize(image_emb, dim=-1)
        txt = F.normalize(text_emb, dim=-1)
        return self.logit_scale.exp() * img @ txt.t()


class LoraLinear(nn.Module):
    """Frozen Linear plus a trainable rank-r residual A @ B."""

    def __init__(self, base: nn.Linear, rank: int, generator: torch.Generator):
        super().__init__()
        out_features, in_features = base.weight.shape
        if rank > min(out_features, in_features):
            raise ValueError(
                f"rank {rank} exceeds min{out_features, in_features} of the base layer"
            )
        self.base = base
        for p in self.base.parameters():
            p.requires_grad_(False)
        self.lora_a = nn.Parameter(
            torch.randn(out_features, rank, generator=generator) * 0.02
        )
        self.lora_b = nn.Parameter(torch.zeros(rank, in_features))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.base(x) + F.linear(F.linear(x, self.lora_b), self.lora_a)

    def collapsed(self) -> nn.Linear:
        merged = nn.Linear(
            self.base.in_features, self.base.out_features, bias=self.base.bias is not None
        )
        with torch.no_grad():
            merged.weight.copy_(self.base.weight + self.lora_a @ self.lora_b)
            if self.base.bias is not None:
                merged.bias.copy_(self.base.bias)
        return merged


def add_adapters(model: TwoTowerModel, rank: int, seed: int = 0) -> list[tuple[int, int]]:
    """Wrap every Linear in both towers; returns the adapted (m, l) shapes."""
    gen = torch.Generator().manual_seed(seed)
    shapes: list[tuple[int, int]] = []

    def wrap(module: nn.Module):
        for name, child in module.named_children():
            if isinstance(child, nn.Linear):
                setattr(module, name, LoraLinear(child, rank, gen))
                shapes.append(tuple(child.weight.shape))
            else:
                wrap(child)

    for p in model.parameters():
        p.requires_grad_(False)
    wrap(model.text)
    wrap(model.image)
    return shapes


def collapse_adapters(model: TwoTowerModel) -> None:
    """Fold every LoraLinear back into a plain Linear, in place."""

    def fold(module: nn.Module):
        for name, child in module.named_children():
            if isinstance(child, LoraLinear):
                setattr(module, name, child.collapsed())
            else:
                fold(child)

    fold(model)


def trainable_parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters() if p.requires_grad)


@dataclass
class Checkpoint:
    state_dict: dict
    meta: dict


def init_checkpoint(path: str | Path, seed: int = 0) -> Path:
    """Materialize the source (pre-fine-tune) model checkpoint."""
    torch.manual_seed(seed)
    model = TwoTowerModel()
    save_checkpoint(path, model, {"seed": seed, "kind": "source"})
    return Path(path)


def save_checkpoint(path: str | Path, model: nn.Module, meta: dict | None = None) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    torch.save({"state_dict": model.state_dict(), "meta": meta or {}}, tmp)
    tmp.replace(path)


def load_checkpoint(path: str | Path) -> TwoTowerModel:
    payload = torch.load(Path(path), map_location="cpu", weights_only=True)
    model = TwoTowerModel()
    model.load_state_dict(payload["state_dict"])
    return model
