import numpy as np
import pytest

from vlharness.kernels import (
    channel_moments,
    collapse_low_rank,
    interpolate_weights,
    pack_sentences,
    recolor_to_moments,
    sentences_of,
    statistic_transfer,
)
from vlharness.stylize import augment_image, style_pool, stylize_image

rng = np.random.default_rng(42)


def _count(text):
    return len(text.split())


def test_sentences_of():
    assert sentences_of("One. Two two! Three?") == ["One.", "Two two!", "Three?"]
    assert sentences_of("  gappy   text. trailing bit") == ["gappy text.", "trailing bit"]


def test_pack_round_trip():
    text = " ".join(f"s{i} a b c." for i in range(30))
    chunks = pack_sentences(text, 12, _count)
    assert " ".join(chunks) == " ".join(text.split())
    assert all(_count(c) <= 12 for c in chunks)


def test_pack_oversized_sentence():
    with pytest.raises(ValueError):
        pack_sentences("one two three four.", 3, _count)


def test_collapse_and_interpolate():
    w = rng.normal(size=(8, 6))
    a = rng.normal(size=(8, 3))
    b = rng.normal(size=(3, 6))
    assert np.allclose(collapse_low_rank(w, a, b), w + a @ b)
    src = rng.normal(size=(5, 5))
    ft = rng.normal(size=(5, 5))
    assert np.array_equal(interpolate_weights(src, ft, 1.0), src)
    assert np.array_equal(interpolate_weights(src, ft, 0.0), ft)


def test_statistic_transfer_moments():
    content = rng.normal(0.3, 0.2, size=(3, 16, 16))
    style = rng.normal(0.6, 0.4, size=(3, 12, 12))
    out = statistic_transfer(content, style, 1.0)
    mu_o, sd_o = channel_moments(out)
    mu_s, sd_s = channel_moments(style)
    assert np.abs(mu_o - mu_s).max() <= 1e-6
    assert np.abs(sd_o - sd_s).max() <= 1e-5
    assert np.array_equal(statistic_transfer(content, style, 0.0), content)


def test_recolor_matches_content_moments():
    style = rng.uniform(size=(3, 20, 20))
    content = rng.uniform(size=(3, 14, 18))
    out = recolor_to_moments(style, content)
    sf = out.reshape(3, -1)
    cf = content.reshape(3, -1)
    assert np.abs(sf.mean(axis=1) - cf.mean(axis=1)).max() <= 1e-6
    assert np.abs(np.cov(sf, bias=True) - np.cov(cf, bias=True)).max() <= 1e-6


def test_style_pool_shape_and_range():
    pool = style_pool(4, (32, 48), seed=1)
    assert pool.shape == (4, 3, 32, 48)
    assert pool.min() >= 0.0 and pool.max() <= 1.0
    assert np.array_equal(pool, style_pool(4, (32, 48), seed=1))


def test_stylize_image_stays_in_range():
    img = rng.uniform(size=(3, 32, 32))
    style = style_pool(1, (32, 32), seed=3)[0]
    out = stylize_image(img, style, 0.5)
    assert out.shape == img.shape
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_augment_deterministic_per_seed():
    img = rng.uniform(size=(3, 16, 16))
    a = augment_image(img, np.random.default_rng(9))
    b = augment_image(img, np.random.default_rng(9))
    assert np.array_equal(a, b)
    assert a.min() >= 0.0 and a.max() <= 1.0
