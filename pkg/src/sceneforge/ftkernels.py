"""Encoder-agnostic numeric kernels for contrastive VL fine-tuning.

Pure numpy, no training state: cosine similarity of embedding pairs, low-rank
residual adapters (applied on the fly or collapsed into the base matrix),
weight-space model averaging, sentence-boundary caption splitting with
mean-of-chunks encoding, channel-statistic (AdaIN-style) transfer with an
interpolation factor, and moment-matching color transfer between 3-channel
images.

Conventions: ``average_weights(src, ft, alpha)`` puts ``alpha`` on the source
(pre-fine-tune) weights. The caption-split mean is not re-normalized; cosine
similarity normalizes downstream. Tensors for the statistic operators are
channel-first (C, H, W). Epsilons: sigma guard 1e-6, covariance eigenvalue
floor 1e-8 (float32-robust).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SIGMA_EPS = 1e-6
EIGVAL_FLOOR = 1e-8
DEFAULT_CONTEXT_BUDGET = 77

_SENTENCE_SPLIT = re.compile(r"(?<=[.?!])\s+")


class ShapeError(ValueError):
    pass


class CaptionBudgetError(ValueError):
    """A single sentence does not fit the token budget."""


def _as_matrix(x, name: str) -> np.ndarray:
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


@dataclass(frozen=True)
class LoraAdapter:
    """Low-rank residual A (m x r) times B (r x l), added to an m x l base."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _as_matrix(self.a, "adapter A")
        b = _as_matrix(self.b, "adapter B")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.shape[1] != b.shape[0]:
            raise ShapeError(f"rank mismatch: A is {a.shape}, B is {b.shape}")
        r = a.shape[1]
        if r < 1:
            raise ShapeError("rank must be >= 1")
        if r > min(a.shape[0], b.shape[1]):
            raise ShapeError(
                f"rank {r} exceeds min(m, l) = {min(a.shape[0], b.shape[1])}"
            )

    @property
    def rank(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.a.shape[0], self.b.shape[1])


def similarity(e_t, e_i) -> float:
    """Cosine of two nonzero embeddings of equal dimension."""
    a = np.asarray(e_t, dtype=np.float64).ravel()
    b = np.asarray(e_i, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("similarity of a zero vector is undefined")
    return float(min(1.0, max(-1.0, float(a @ b) / (na * nb))))


def lora_collapse(w, adapter: LoraAdapter) -> np.ndarray:
    """Fold the adapter into the base weights: W + A @ B."""
    base = _as_matrix(w, "W")
    if adapter.shape != base.shape:
        raise ShapeError(f"adapter {adapter.shape} does not match W {base.shape}")
    return base + adapter.a @ adapter.b

def lora_apply(w, adapter: LoraAdapter, x) -> np.ndarray:
    """Adapter-path forward W@x + A@(B@x), never forming A@B."""
    base = _as_matrix(w, "W")
    if adapter.shape != base.shape:
        raise ShapeError(f"adapter {adapter.shape} does not match W {base.shape}")
    vec = np.asarray(x, dtype=np.float64)
    if vec.shape[0] != base.shape[1]:
        raise ShapeError(f"x has dim {vec.shape[0]}, W expects {base.shape[1]}")
    return base @ vec + adapter.a @ (adapter.b @ vec)


def adapter_param_count(shapes, rank: int) -> int:
    """Total extra parameters: sum of rank * (m + l) over adapted layers."""
    if rank < 1:
        raise ValueError("rank must be >= 1")
    return sum(rank * (int(m) + int(l)) for m, l in shapes)


def average_weights(src, ft, alpha: float) -> np.ndarray:
    """alpha * src + (1 - alpha) * ft; alpha weights the source model."""
    a = np.asarray(src, dtype=np.float64)
    b = np.asarray(ft, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if alpha == 1.0:
        return a.copy()
    if alpha == 0.0:
        return b.copy()
    return alpha * a + (1.0 - alpha) * b


def whitespace_token_count(text: str) -> int:
    return len(text.split())


def split_sentences(text: str) -> list[str]:
    """Whitespace-normalized sentences, split after '.', '?', or '!'."""
    normalized = " ".join(text.split())
    if not normalized:
        return []
    return _SENTENCE_SPLIT.split(normalized)


def split_caption(
    text: str,
    budget: int,
    count_tokens: Callable[[str], int] | None = None,
) -> list[str]:
    """Greedy left-to-right packing of sentences into <= budget-token chunks.

    Joining the chunks with single spaces reproduces the whitespace-normalized
    input. Raises CaptionBudgetError when one sentence alone exceeds budget.
    """
    counter = count_tokens or whitespace_token_count
    sentences = split_sentences(text)
    chunks: list[str] = []
    current = ""
    for sentence in sentences:
        if counter(sentence) > budget:
            raise CaptionBudgetError(
                f"sentence of {counter(sentence)} tokens exceeds budget {budget}: "
                f"{sentence[:60]!r}"
            )
        candidate = f"{current} {sentence}" if current else sentence
        if counter(candidate) <= budget:
            current = candidate
        else:
            chunks.append(current)
            current = sentence
    if current:
        chunks.append(current)
    return chunks


@dataclass(frozen=True)
class TextEncoderFn:
    """Opaque text encoder plus its context budget and token counter."""

    encode: Callable[[str], np.ndarray]
    context_budget: int = DEFAULT_CONTEXT_BUDGET
    count_tokens: Callable[[str], int] = field(default=whitespace_token_count)

    def __post_init__(self):
        if self.context_budget < 1:
            raise ValueError("context_budget must be >= 1")


def split_encode(text: str, enc: TextEncoderFn) -> np.ndarray:
    """Mean of per-chunk embeddings (plain mean, not re-normalized)."""
    chunks = split_caption(text, enc.context_budget, enc.count_tokens)
    if not chunks:
        raise CaptionBudgetError("cannot encode an empty caption")
    embeddings = [np.asarray(enc.encode(c), dtype=np.float64) for c in chunks]
    return np.mean(embeddings, axis=0)


def channel_stats(tensor) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel (mean, population std) of a (C, H, W) tensor."""
    t = np.asarray(tensor, dtype=np.float64)
    if t.ndim != 3:
        raise ShapeError(f"expected a (C, H, W) tensor, got shape {t.shape}")
    flat = t.reshape(t.shape[0], -1)
    return flat.mean(axis=1), flat.std(axis=1)


def adain_transfer(content, style, alpha: float) -> np.ndarray:
    """Blend content toward style channel statistics.

    out = alpha * (sigma_s * (c - mu_c) / (sigma_c + eps) + mu_s)
        + (1 - alpha) * c, per channel.
    """
    c = np.asarray(content, dtype=np.float64)
    s = np.asarray(style, dtype=np.float64)
    if c.ndim != 3 or s.ndim != 3:
        raise ShapeError("content and style must be (C, H, W) tensors")
    if c.shape[0] != s.shape[0]:
        raise ShapeError(f"channel mismatch: {c.shape[0]} vs {s.shape[0]}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if alpha == 0.0:
        return c.copy()
    mu_c, sd_c = channel_stats(c)
    mu_s, sd_s = channel_stats(s)
    aligned = (
        sd_s[:, None, None] * (c - mu_c[:, None, None]) / (sd_c[:, None, None] + SIGMA_EPS)
        + mu_s[:, None, None]
    )
    return alpha * aligned + (1.0 - alpha) * c


def match_color_distribution(style, content) -> np.ndarray:
    """Recolor the style image to the content's channel mean and covariance.

    Whitening-coloring transform: style pixels are whitened by the style
    covariance (eigenvalues floored at EIGVAL_FLOOR) and re-colored by the
    content covariance, then shifted to the content mean.
    """
    s = np.asarray(style, dtype=np.float64)
    c = np.asarray(content, dtype=np.float64)
    if s.ndim != 3 or s.shape[0] != 3 or c.ndim != 3 or c.shape[0] != 3:
        raise ShapeError("expected (3, H, W) images")

    s_flat = s.reshape(3, -1)
    c_flat = c.reshape(3, -1)
    mu_s = s_flat.mean(axis=1, keepdims=True)
    mu_c = c_flat.mean(axis=1, keepdims=True)

    def _cov(flat, mu):
        d = flat - mu
        return (d @ d.T) / flat.shape[1]

    def _power(mat, exponent):
        vals, vecs = np.linalg.eigh(mat)
        vals = np.maximum(vals, EIGVAL_FLOOR)
        return (vecs * vals**exponent) @ vecs.T

    whiten = _power(_cov(s_flat, mu_s), -0.5)
    color = _power(_cov(c_flat, mu_c), 0.5)
    out = color @ whiten @ (s_flat - mu_s) + mu_c
    return out.reshape(s.shape)
