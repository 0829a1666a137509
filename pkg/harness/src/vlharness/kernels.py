"""Harness-side numeric primitives.

These intentionally re-derive the math used upstream (low-rank collapse,
weight interpolation, channel-statistic transfer, moment-matched recoloring,
sentence packing) so the SVCW fixture check is a genuine cross-implementation
comparison, not a re-import.
"""

from __future__ import annotations

import re

import numpy as np

SIGMA_EPS = 1e-6
EIG_FLOOR = 1e-8

# a sentence runs through its terminator(s) up to whitespace or end of text
_SENT_RE = re.compile(r"\S.*?[.?!]+(?=\s|$)|\S[^.?!]*$")


def collapse_low_rank(w: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.asarray(w, np.float64) + np.asarray(a, np.float64) @ np.asarray(b, np.float64)


def interpolate_weights(src: np.ndarray, ft: np.ndarray, alpha: float) -> np.ndarray:
    """alpha on the source weights; endpoints reproduce the inputs exactly."""
    src = np.asarray(src, np.float64)
    ft = np.asarray(ft, np.float64)
    return alpha * src + (1.0 - alpha) * ft


def channel_moments(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    flat = np.asarray(t, np.float64).reshape(t.shape[0], -1)
    return flat.mean(axis=1), flat.std(axis=1)


def statistic_transfer(content: np.ndarray, style: np.ndarray, alpha: float) -> np.ndarray:
    """Blend content toward the style's per-channel mean/std."""
    content = np.asarray(content, np.float64)
    mu_c, sd_c = channel_moments(content)
    mu_s, sd_s = channel_moments(style)
    gain = (sd_s / (sd_c + SIGMA_EPS))[:, None, None]
    aligned = gain * (content - mu_c[:, None, None]) + mu_s[:, None, None]
    return content + alpha * (aligned - content)


def recolor_to_moments(style: np.ndarray, content: np.ndarray) -> np.ndarray:
    """Map style pixels onto the content's channel mean and 3x3 covariance."""
    s = np.asarray(style, np.float64).reshape(3, -1)
    c = np.asarray(content, np.float64).reshape(3, -1)
    mu_s = s.mean(axis=1, keepdims=True)
    mu_c = c.mean(axis=1, keepdims=True)
    cov_s = np.cov(s, bias=True)
    cov_c = np.cov(c, bias=True)

    def mat_pow(m, p):
        vals, vecs = np.linalg.eigh(m)
        vals = np.clip(vals, EIG_FLOOR, None)
        return vecs @ np.diag(vals**p) @ vecs.T

    transform = mat_pow(cov_c, 0.5) @ mat_pow(cov_s, -0.5)
    return (transform @ (s - mu_s) + mu_c).reshape(style.shape)


def sentences_of(text: str) -> list[str]:
    normalized = " ".join(text.split())
    return [m.group(0).strip() for m in _SENT_RE.finditer(normalized) if m.group(0).strip()]


def pack_sentences(text: str, budget: int, count_tokens) -> list[str]:
    """Greedy left-to-right packing; errors if one sentence overflows."""
    chunks: list[str] = []
    current: list[str] = []
    current_text = ""
    for sentence in sentences_of(text):
        if count_tokens(sentence) > budget:
            raise ValueError(
                f"sentence exceeds context budget {budget}: {sentence[:50]!r}"
            )
        trial = (current_text + " " + sentence).strip()
        if count_tokens(trial) <= budget:
            current.append(sentence)
            current_text = trial
        else:
            chunks.append(current_text)
            current = [sentence]
            current_text = sentence
    if current_text:
        chunks.append(current_text)
    return chunks
