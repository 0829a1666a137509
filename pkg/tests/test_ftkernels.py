import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sceneforge.ftkernels import (
    CaptionBudgetError,
    LoraAdapter,
    ShapeError,
    TextEncoderFn,
    adain_transfer,
    adapter_param_count,
    average_weights,
    channel_stats,
    lora_apply,
    lora_collapse,
    match_color_distribution,
    similarity,
    split_caption,
    split_encode,
    split_sentences,
    whitespace_token_count,
)

rng = np.random.default_rng(12345)


# ----------------------------------------------------------- similarity

def test_similarity_examples():
    assert similarity([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(1.0)
    assert similarity([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)
    assert similarity([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(-1.0)


def test_similarity_errors():
    with pytest.raises(ShapeError):
        similarity([1.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        similarity([0.0, 0.0], [1.0, 0.0])


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_similarity_scale_invariant(c):
    a = np.array([0.3, -1.2, 2.2, 0.5])
    b = np.array([1.0, 0.4, -0.3, 2.0])
    assert abs(similarity(c * a, b) - similarity(a, b)) <= 1e-12


def test_similarity_bounded():
    for _ in range(100):
        a, b = rng.normal(size=8), rng.normal(size=8)
        assert -1.0 <= similarity(a, b) <= 1.0


# ------------------------------------------------------------------ LoRA

def test_lora_zero_adapter_identity():
    w = rng.normal(size=(6, 4))
    ad = LoraAdapter(a=np.zeros((6, 2)), b=rng.normal(size=(2, 4)))
    assert np.array_equal(lora_collapse(w, ad), w)


def test_lora_hand_arithmetic():
    w = np.eye(2)
    ad = LoraAdapter(a=np.array([[1.0], [0.0]]), b=np.array([[0.0, 2.0]]))
    assert np.array_equal(lora_collapse(w, ad), np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_lora_apply_matches_collapse():
    for _ in range(100):
        w = rng.normal(size=(64, 64))
        ad = LoraAdapter(a=rng.normal(size=(64, 16)), b=rng.normal(size=(16, 64)))
        x = rng.normal(size=64)
        via_collapse = lora_collapse(w, ad) @ x
        via_apply = lora_apply(w, ad, x)
        denom = max(np.linalg.norm(via_collapse), 1e-30)
        assert np.linalg.norm(via_apply - via_collapse) / denom <= 1e-6


def test_lora_apply_zero_vector():
    w = rng.normal(size=(5, 3))
    ad = LoraAdapter(a=rng.normal(size=(5, 2)), b=rng.normal(size=(2, 3)))
    assert np.array_equal(lora_apply(w, ad, np.zeros(3)), w @ np.zeros(3))


def test_lora_shape_checks():
    with pytest.raises(ShapeError):
        LoraAdapter(a=rng.normal(size=(4, 2)), b=rng.normal(size=(3, 4)))
    with pytest.raises(ShapeError):
        LoraAdapter(a=rng.normal(size=(4, 5)), b=rng.normal(size=(5, 4)))  # r > min(m,l)
    ad = LoraAdapter(a=rng.normal(size=(4, 2)), b=rng.normal(size=(2, 3)))
    with pytest.raises(ShapeError):
        lora_collapse(rng.normal(size=(4, 4)), ad)


def test_adapter_param_count():
    assert adapter_param_count([(64, 64)], 16) == 2048
    assert adapter_param_count([], 16) == 0
    assert adapter_param_count([(768, 768), (768, 3072)], 16) == 86016
    with pytest.raises(ValueError):
        adapter_param_count([(4, 4)], 0)


# -------------------------------------------------------------- averaging

def test_average_endpoints_exact():
    src = rng.normal(size=(8, 8))
    ft = rng.normal(size=(8, 8))
    assert np.array_equal(average_weights(src, ft, 1.0), src)
    assert np.array_equal(average_weights(src, ft, 0.0), ft)


def test_average_midpoint():
    src = np.full((3, 3), 2.0)
    ft = np.full((3, 3), 4.0)
    assert np.allclose(average_weights(src, ft, 0.5), 3.0, atol=1e-12)
    a = rng.normal(size=(16, 16))
    b = rng.normal(size=(16, 16))
    assert np.abs(average_weights(a, b, 0.5) - (a + b) / 2).max() <= 1e-12


def test_average_validation():
    with pytest.raises(ValueError):
        average_weights(np.eye(2), np.eye(2), 1.5)
    with pytest.raises(ShapeError):
        average_weights(np.eye(2), np.eye(3), 0.5)


# ------------------------------------------------------- caption splitting

def test_split_sentences():
    assert split_sentences("One. Two two! Three?") == ["One.", "Two two!", "Three?"]
    assert split_sentences("  spaced   out. ") == ["spaced out."]
    assert split_sentences("no terminator here") == ["no terminator here"]
    assert split_sentences("") == []


def test_split_greedy_packing():
    text = "a b c d. e f g h. i j k l."
    chunks = split_caption(text, budget=10)
    assert chunks == ["a b c d. e f g h.", "i j k l."]


def test_split_single_chunk():
    text = "short caption here."
    assert split_caption(text, budget=77) == [text]


def test_split_round_trip_and_budget():
    text = " ".join(f"word{i} word word word." for i in range(40))
    chunks = split_caption(text, budget=13)
    for chunk in chunks:
        assert whitespace_token_count(chunk) <= 13
    assert " ".join(chunks) == " ".join(text.split())


def test_split_sentence_exceeding_budget():
    with pytest.raises(CaptionBudgetError):
        split_caption("one two three four five.", budget=3)


@given(st.lists(st.integers(min_value=1, max_value=6), min_size=1, max_size=20))
@settings(max_examples=50)
def test_split_round_trip_property(lengths):
    text = " ".join("w " * (n - 1) + "w." for n in lengths)
    chunks = split_caption(text, budget=6)
    assert " ".join(chunks) == " ".join(text.split())
    assert all(whitespace_token_count(c) <= 6 for c in chunks)


def test_split_encode_single_chunk_exact():
    calls = []

    def encode(text):
        calls.append(text)
        return np.array([1.0, 2.0, 3.0])

    enc = TextEncoderFn(encode=encode, context_budget=77)
    out = split_encode("tiny caption.", enc)
    assert calls == ["tiny caption."]
    assert np.array_equal(out, np.array([1.0, 2.0, 3.0]))


def test_split_encode_mean():
    outputs = iter([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    enc = TextEncoderFn(encode=lambda t: next(outputs), context_budget=4)
    out = split_encode("a b c. d e f.", enc)
    assert np.allclose(out, [0.5, 0.5])


def test_split_encode_identical_chunks():
    enc = TextEncoderFn(encode=lambda t: np.array([2.0, -1.0]), context_budget=3)
    out = split_encode("a b. a b. a b.", enc)
    assert np.allclose(out, [2.0, -1.0])


# ---------------------------------------------------------------- AdaIN

def test_adain_alpha_zero_identity():
    content = rng.normal(size=(3, 8, 9))
    style = rng.normal(size=(3, 5, 4))
    assert np.array_equal(adain_transfer(content, style, 0.0), content)


def test_adain_full_transfer_stats():
    content = rng.normal(loc=0.0, scale=1.0, size=(3, 32, 32))
    style = rng.normal(loc=2.0, scale=3.0, size=(3, 24, 24))
    out = adain_transfer(content, style, 1.0)
    mu_out, sd_out = channel_stats(out)
    mu_s, sd_s = channel_stats(style)
    assert np.abs(mu_out - mu_s).max() <= 1e-6
    assert np.abs(sd_out - sd_s).max() <= 1e-5


def test_adain_half_blend_is_affine():
    # exact-stat construction: mu_c=0, sd_c=1, mu_s=2, sd_s=3 -> out = 2c + 1
    base = rng.normal(size=(1, 64, 64))
    mu, sd = channel_stats(base)
    content = (base - mu[:, None, None]) / sd[:, None, None]
    s_raw = rng.normal(size=(1, 50, 50))
    mu_s, sd_s = channel_stats(s_raw)
    style = (s_raw - mu_s[:, None, None]) / sd_s[:, None, None] * 3.0 + 2.0
    out = adain_transfer(content, style, 0.5)
    predicted = 2.0 * content + 1.0
    assert np.abs(out - predicted).max() <= 1e-4
    mu_o, sd_o = channel_stats(out)
    assert mu_o[0] == pytest.approx(1.0, abs=1e-5)
    assert sd_o[0] == pytest.approx(2.0, abs=1e-4)


def test_adain_predicted_statistics():
    for _ in range(20):
        content = rng.normal(loc=rng.normal(), scale=rng.uniform(0.5, 2), size=(3, 16, 16))
        style = rng.normal(loc=rng.normal(), scale=rng.uniform(0.5, 2), size=(3, 10, 12))
        alpha = float(rng.uniform())
        out = adain_transfer(content, style, alpha)
        mu_c, sd_c = channel_stats(content)
        mu_s, sd_s = channel_stats(style)
        scale = alpha * sd_s / (sd_c + 1e-6) + (1 - alpha)
        shift = alpha * (mu_s - sd_s * mu_c / (sd_c + 1e-6))
        mu_o, sd_o = channel_stats(out)
        assert np.abs(mu_o - (scale * mu_c + shift)).max() <= 1e-5
        assert np.abs(sd_o - np.abs(scale) * sd_c).max() <= 1e-5


def test_adain_channel_mismatch():
    with pytest.raises(ShapeError):
        adain_transfer(rng.normal(size=(3, 4, 4)), rng.normal(size=(4, 4, 4)), 0.5)


def test_adain_alpha_range():
    with pytest.raises(ValueError):
        adain_transfer(rng.normal(size=(3, 4, 4)), rng.normal(size=(3, 4, 4)), 1.5)


# -------------------------------------------------------- color matching

def _cov3(img):
    flat = img.reshape(3, -1)
    d = flat - flat.mean(axis=1, keepdims=True)
    return (d @ d.T) / flat.shape[1]


def test_color_match_moments():
    for _ in range(20):
        style = rng.uniform(size=(3, 20, 24))
        content = rng.uniform(size=(3, 16, 16)) * rng.uniform(0.5, 2.0, size=(3, 1, 1))
        out = match_color_distribution(style, content)
        assert out.shape == style.shape
        assert np.abs(out.reshape(3, -1).mean(axis=1) - content.reshape(3, -1).mean(axis=1)).max() <= 1e-5
        assert np.abs(_cov3(out) - _cov3(content)).max() <= 1e-5


def test_color_match_identity_when_already_matching():
    style = rng.uniform(size=(3, 30, 30))
    out = match_color_distribution(style, style.copy())
    assert np.abs(out - style).max() <= 1e-5


def test_color_match_constant_style():
    style = np.full((3, 8, 8), 0.25)
    content = rng.uniform(size=(3, 12, 12))
    out = match_color_distribution(style, content)
    means = content.reshape(3, -1).mean(axis=1)
    assert np.abs(out - means[:, None, None]).max() <= 1e-6


def test_color_match_requires_three_channels():
    with pytest.raises(ShapeError):
        match_color_distribution(rng.uniform(size=(4, 4, 4)), rng.uniform(size=(3, 4, 4)))
