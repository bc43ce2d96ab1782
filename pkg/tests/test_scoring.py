import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iat.core import Block, LayerKind, LayerNode, Tensor, TensorRole, TensorSpec
from iat.scoring import block_pair_score, shape_score
from iat.synthetic import act, bn, conv
from iat.transfer import clip_transfer


def conv_layer(*shape):
    return LayerNode("c", LayerKind.CONV2D, (TensorSpec(TensorRole.WEIGHT, shape),), path="c")


def test_score_of_paper_shapes_is_exact():
    assert shape_score(conv_layer(16, 3, 3, 3), conv_layer(32, 3, 5, 5)) == 0.18


def test_identical_shapes_score_one():
    a = conv_layer(16, 8, 3, 3)
    assert shape_score(a, a) == 1.0


def test_different_kinds_score_zero():
    c = conv_layer(8, 8, 3, 3)
    lin = LayerNode("l", LayerKind.LINEAR, (TensorSpec(TensorRole.WEIGHT, (8, 8)),), path="l")
    assert shape_score(c, lin) == 0.0
    assert shape_score(lin, c) == 0.0


def test_parameterless_and_opaque_score_zero():
    a = act()
    assert shape_score(a, a) == 0.0
    op = LayerNode("o", LayerKind.OPAQUE, (TensorSpec(TensorRole.WEIGHT, (4, 4)),), path="o")
    assert shape_score(op, op) == 0.0


def test_rank_mismatch_scores_zero():
    # opaque-free corner: same kind can't differ in rank after validation,
    # but the function must stay total
    a = conv_layer(8, 8, 3, 3)
    b = LayerNode("c", LayerKind.CONV2D, (TensorSpec(TensorRole.WEIGHT, (8, 8)),), path="c")
    assert shape_score(a, b) == 0.0


kind_strategy = st.sampled_from([LayerKind.CONV2D, LayerKind.BATCHNORM2D, LayerKind.LINEAR])


@st.composite
def weighted_layer(draw):
    kind = draw(kind_strategy)
    rank = {LayerKind.CONV2D: 4, LayerKind.LINEAR: 2, LayerKind.BATCHNORM2D: 1}[kind]
    shape = tuple(draw(st.integers(1, 64)) for _ in range(rank))
    return LayerNode("x", kind, (TensorSpec(TensorRole.WEIGHT, shape),), path="x")


@given(weighted_layer(), weighted_layer())
def test_score_symmetric_and_bounded(a, b):
    ab, ba = shape_score(a, b), shape_score(b, a)
    assert ab == ba
    assert 0.0 <= ab <= 1.0


@given(weighted_layer(), weighted_layer())
def test_score_one_iff_same_kind_and_shape(a, b):
    score = shape_score(a, b)
    same = a.kind == b.kind and a.weight.shape == b.weight.shape
    assert (score == 1.0) == same


@given(st.lists(st.integers(1, 12), min_size=4, max_size=4).map(tuple),
       st.lists(st.integers(1, 12), min_size=4, max_size=4).map(tuple))
@settings(max_examples=60)
def test_score_equals_transferred_fraction(t_shape, s_shape):
    """When one tensor dominates dimension-wise, the score is the copied
    fraction of the larger tensor; verified against actual clip counts."""
    score = shape_score(conv_layer(*t_shape), conv_layer(*s_shape))
    target = Tensor(np.full(t_shape, np.nan, dtype=np.float32))
    source = Tensor(np.zeros(s_shape, dtype=np.float32))
    copied = int(np.sum(~np.isnan(clip_transfer(target, source).data)))
    if all(t <= s for t, s in zip(t_shape, s_shape)):
        assert score == pytest.approx(copied / source.numel, rel=1e-12)
    if all(t >= s for t, s in zip(t_shape, s_shape)):
        assert score == pytest.approx(copied / target.numel, rel=1e-12)


def test_block_pair_self_match():
    block = Block((conv("c", 8, 3), bn("b", 8)))
    score, matches = block_pair_score(block, block)
    assert score == 2.0
    assert [(m.target_path, m.source_path, m.score) for m in matches] == [
        ("c", "c", 1.0),
        ("b", "b", 1.0),
    ]


def test_block_pair_incompatible_kinds():
    score, matches = block_pair_score(Block((conv("c", 8, 3),)), Block((bn("b", 8),)))
    assert score == 0.0 and matches == []


def test_block_pair_without_parameterized_layers():
    score, matches = block_pair_score(Block((act(),)), Block((conv("c", 8, 3),)))
    assert score == 0.0 and matches == []


def test_block_pair_penalized_fan_out():
    target = Block((conv("t0", 8, 8), conv("t1", 8, 8), conv("t2", 8, 8)))
    source = Block((conv("s0", 8, 8), conv("s1", 8, 8)))
    score, matches = block_pair_score(target, source)
    assert score == pytest.approx(1 + 2 / math.sqrt(2), abs=1e-12)
    # every target layer used exactly once, sources in order, one fan-out
    assert [m.target_path for m in matches] == ["t0", "t1", "t2"]
    assert [m.source_path for m in matches] in (["s0", "s0", "s1"], ["s0", "s1", "s1"])
