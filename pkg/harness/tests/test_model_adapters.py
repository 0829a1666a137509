import copy

import pytest
import torch

from vlharness.model import (
    Tokenizer,
    add_adapters,
    collapse_adapters,
    init_checkpoint,
    load_checkpoint,
    trainable_parameter_count,
)
from vlharness.train import contrastive_loss, encode_captions


def fixed_batch(n=8, size=32, seed=0):
    g = torch.Generator().manual_seed(seed)
    images = torch.rand((n, 3, size, size), generator=g)
    captions = [f"A scene number {i} with a red chair and a blue table." for i in range(n)]
    return images, captions


def test_tokenizer_deterministic_and_bounded():
    tok = Tokenizer()
    a = tok.tokenize("A red chair; a BLUE table!")
    b = tok.tokenize("A red chair; a BLUE table!")
    assert a == b
    assert all(0 <= t < tok.vocab_size for t in a)
    assert tok.count_tokens("one two three") == 3
    assert tok.count_tokens("") == 0


def test_checkpoint_round_trip(tmp_path):
    path = init_checkpoint(tmp_path / "m.pt", seed=3)
    model = load_checkpoint(path)
    images, captions = fixed_batch()
    with torch.no_grad():
        logits = model.logits(model.encode_images(images), encode_captions(model, captions))
    model2 = load_checkpoint(path)
    with torch.no_grad():
        logits2 = model2.logits(model2.encode_images(images), encode_captions(model2, captions))
    assert torch.equal(logits, logits2)


def test_adapters_start_as_identity(tmp_path):
    path = init_checkpoint(tmp_path / "m.pt", seed=1)
    base = load_checkpoint(path)
    adapted = load_checkpoint(path)
    add_adapters(adapted, rank=16, seed=7)
    images, captions = fixed_batch()
    with torch.no_grad():
        lb = base.logits(base.encode_images(images), encode_captions(base, captions))
        la = adapted.logits(adapted.encode_images(images), encode_captions(adapted, captions))
    # B starts at zero, so the adapted model computes exactly the base model
    assert torch.equal(lb, la)


def test_adapter_shapes_and_param_count(tmp_path):
    model = load_checkpoint(init_checkpoint(tmp_path / "m.pt"))
    shapes = add_adapters(model, rank=16)
    assert shapes  # every Linear in both towers
    expected = sum(16 * (m + l) for m, l in shapes)
    assert trainable_parameter_count(model) == expected


def test_gradient_isolation_after_step(tmp_path):
    model = load_checkpoint(init_checkpoint(tmp_path / "m.pt", seed=2))
    add_adapters(model, rank=8, seed=5)
    frozen_before = {
        name: p.detach().clone()
        for name, p in model.named_parameters()
        if not p.requires_grad
    }
    adapters_before = {
        name: p.detach().clone()
        for name, p in model.named_parameters()
        if p.requires_grad
    }
    optimizer = torch.optim.Adam(
        [p for p in model.parameters() if p.requires_grad], lr=1e-2
    )
    images, captions = fixed_batch()
    loss = contrastive_loss(
        model.logits(model.encode_images(images), encode_captions(model, captions))
    )
    loss.backward()
    optimizer.step()
    for name, p in model.named_parameters():
        if name in frozen_before:
            assert torch.equal(p, frozen_before[name]), f"{name} moved"
        else:
            # every lora_b gets gradient; lora_a only through nonzero b
            if name.endswith("lora_b"):
                assert not torch.equal(p, adapters_before[name]), f"{name} did not move"


def test_collapse_matches_adapter_path(tmp_path):
    model = load_checkpoint(init_checkpoint(tmp_path / "m.pt", seed=4))
    add_adapters(model, rank=16, seed=9)
    # push adapters away from zero so the check is not the trivial identity
    optimizer = torch.optim.Adam(
        [p for p in model.parameters() if p.requires_grad], lr=5e-2
    )
    images, captions = fixed_batch()
    for _ in range(5):
        loss = contrastive_loss(
            model.logits(model.encode_images(images), encode_captions(model, captions))
        )
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()

    collapsed = copy.deepcopy(model)
    collapse_adapters(collapsed)
    with torch.no_grad():
        la = model.logits(model.encode_images(images), encode_captions(model, captions))
        lc = collapsed.logits(
            collapsed.encode_images(images), encode_captions(collapsed, captions)
        )
    assert torch.abs(la - lc).max() <= 1e-4
    # collapsed model has no adapter parameters left
    assert all("lora" not in name for name, _ in collapsed.named_parameters())


def test_rank_bounds(tmp_path):
    model = load_checkpoint(init_checkpoint(tmp_path / "m.pt"))
    with pytest.raises(ValueError):
        add_adapters(model, rank=4096)


def test_split_encode_consistency(tmp_path):
    # captions inside one context window encode identically with and without
    # the split path
    model = load_checkpoint(init_checkpoint(tmp_path / "m.pt", seed=6))
    short = "A small red chair is to the left of a wooden table."
    direct = model.encode_text_chunks([[short]])
    via_split = encode_captions(model, [short])
    assert torch.equal(direct, via_split)
