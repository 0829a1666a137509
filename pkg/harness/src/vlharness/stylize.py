"""Input-side image processing: stylization and the heavy augmentation policy.

Stylization recolors a synthetic style source toward the frame, then blends
the frame toward that source's channel statistics (interpolation factor
alpha). Real style photographs are not available offline, so style sources
are procedurally generated smooth color fields; the operator chain is the
real one. Augmentations implement the eight named manipulations behind a
single toggle, each applied with probability 0.3 at fixed magnitudes.
"""

from __future__ import annotations

import numpy as np

from .kernels import recolor_to_moments, statistic_transfer

AUGMENT_PROB = 0.3


def style_pool(n: int, size: tuple[int, int], seed: int = 0) -> np.ndarray:
    """(n, 3, H, W) smooth random color fields in [0, 1]."""
    rng = np.random.default_rng(seed)
    h, w = size
    coarse = rng.uniform(0.0, 1.0, size=(n, 3, 5, 5))
    ys = np.linspace(0, 4, h)
    xs = np.linspace(0, 4, w)
    y0 = np.floor(ys).astype(int).clip(0, 3)
    x0 = np.floor(xs).astype(int).clip(0, 3)
    fy = (ys - y0)[None, None, :, None]
    fx = (xs - x0)[None, None, None, :]
    c00 = coarse[:, :, y0][:, :, :, x0]
    c01 = coarse[:, :, y0][:, :, :, x0 + 1]
    c10 = coarse[:, :, y0 + 1][:, :, :, x0]
    c11 = coarse[:, :, y0 + 1][:, :, :, x0 + 1]
    return (
        c00 * (1 - fy) * (1 - fx)
        + c01 * (1 - fy) * fx
        + c10 * fy * (1 - fx)
        + c11 * fy * fx
    )


def stylize_image(image: np.ndarray, style: np.ndarray, alpha: float) -> np.ndarray:
    """Color-match the style source to the frame, then transfer statistics."""
    matched = recolor_to_moments(style, image)
    return np.clip(statistic_transfer(image, matched, alpha), 0.0, 1.0)


def _blur3(img: np.ndarray) -> np.ndarray:
    padded = np.pad(img, ((0, 0), (1, 1), (1, 1)), mode="edge")
    out = np.zeros_like(img)
    for dy in range(3):
        for dx in range(3):
            out += padded[:, dy : dy + img.shape[1], dx : dx + img.shape[2]]
    return out / 9.0


def augment_image(image: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Randomized photometric policy over one (3, H, W) image in [0, 1]."""
    img = image.copy()
    if rng.random() < AUGMENT_PROB:  # inversion
        img = 1.0 - img
    if rng.random() < AUGMENT_PROB:  # contrast
        img = (img - 0.5) * rng.uniform(0.6, 1.6) + 0.5
    if rng.random() < AUGMENT_PROB:  # sharpness (unsharp mask)
        img = img + rng.uniform(0.2, 0.8) * (img - _blur3(img))
    if rng.random() < AUGMENT_PROB:  # equalization (per-channel rank map)
        for c in range(3):
            flat = img[c].ravel()
            ranks = np.argsort(np.argsort(flat))
            img[c] = (ranks / max(flat.size - 1, 1)).reshape(img[c].shape)
    if rng.random() < AUGMENT_PROB:  # posterization
        levels = int(rng.integers(3, 7))
        img = np.round(img * (levels - 1)) / (levels - 1)
    if rng.random() < AUGMENT_PROB:  # colorization (channel gains)
        img = img * rng.uniform(0.7, 1.3, size=(3, 1, 1))
    if rng.random() < AUGMENT_PROB:  # brightness
        img = img + rng.uniform(-0.2, 0.2)
    if rng.random() < AUGMENT_PROB:  # solarization
        thresh = rng.uniform(0.5, 0.9)
        img = np.where(img > thresh, 1.0 - img, img)
    return np.clip(img, 0.0, 1.0)
