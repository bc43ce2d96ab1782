import numpy as np
import pytest

from iat.core import Block, LayerKind, ModuleNode, StandardizedNetwork
from iat.standardize import depth, standardize, standardize_with_stats
from iat.synthetic import (
    act,
    bn,
    conv,
    descriptor,
    efficientnet_style,
    flat_singles,
    inverted_residual,
    random_cnn,
)

K = LayerKind


def kinds(block):
    return [l.kind for l in block.layers]


def test_inverted_residual_collapses_to_single_flat_block():
    desc = descriptor("m", (inverted_residual("ir", 16, 64, 24, 4),))
    net = standardize(desc.root)
    assert len(net.blocks) == 1
    assert kinds(net.blocks[0]) == [
        K.CONV2D, K.BATCHNORM2D, K.ACTIVATION,
        K.CONV2D, K.BATCHNORM2D, K.ACTIVATION,
        K.CONV2D, K.ACTIVATION, K.CONV2D,
        K.CONV2D, K.BATCHNORM2D,
    ]
    # squeeze-excite layers are inlined in declaration order
    assert [l.path for l in net.blocks[0].layers[6:9]] == [
        "ir/se/conv_reduce", "ir/se/act1", "ir/se/conv_expand",
    ]


def test_efficientnet_tree_stage_grouping_dissolves():
    net = standardize(efficientnet_style().root)
    sizes = [len(b.layers) for b in net.blocks]
    # stem singles, one block per bottleneck, head singles
    assert sizes == [1, 1, 1, 5, 11, 11, 11, 11, 1, 1, 1, 1, 1]
    assert kinds(net.blocks[0]) == [K.CONV2D]
    assert kinds(net.blocks[1]) == [K.BATCHNORM2D]
    assert kinds(net.blocks[2]) == [K.ACTIVATION]
    assert kinds(net.blocks[-1]) == [K.LINEAR]
    assert kinds(net.blocks[-2]) == [K.POOL]


def test_flat_sequence_gives_one_block_per_layer():
    desc = flat_singles("flat", n_convs=4)
    net = standardize(desc.root)
    assert all(len(b.layers) == 1 for b in net.blocks)
    assert len(net.blocks) == len(list(desc.layers()))


def test_depth_levels():
    layer = conv("c", 4, 3)
    assert depth([layer, layer]) == 1
    assert depth([layer, [layer, layer]]) == 2
    assert depth([]) == 0


def test_empty_tree_errors():
    with pytest.raises(ValueError, match="no layers"):
        standardize(ModuleNode("empty", ()))


def test_flattening_preserves_layer_order():
    for seed in range(5):
        desc = random_cnn(np.random.default_rng(seed))
        net = standardize(desc.root)
        assert [l.path for l in net.all_layers()] == [l.path for l in desc.layers()]


def test_blocks_nonempty_and_cover_all_leaves():
    desc = efficientnet_style()
    net = standardize(desc.root)
    assert all(len(b.layers) >= 1 for b in net.blocks)
    assert sum(len(b.layers) for b in net.blocks) == len(list(desc.layers()))


def _tree_from_blocks(net: StandardizedNetwork) -> ModuleNode:
    children = []
    for i, block in enumerate(net.blocks):
        if len(block.layers) == 1:
            children.append(block.layers[0])
        else:
            children.append(ModuleNode(f"block{i}", block.layers))
    return ModuleNode("rebuilt", tuple(children))


def test_idempotent_on_already_standardized_tree():
    for seed in range(5):
        net = standardize(random_cnn(np.random.default_rng(seed)).root)
        again = standardize(_tree_from_blocks(net))
        assert [kinds(b) for b in again.blocks] == [kinds(b) for b in net.blocks]
        assert [[l.path for l in b.layers] for b in again.blocks] == [
            [l.path for l in b.layers] for b in net.blocks
        ]


def _deep_tree(n_groups: int, chain_depth: int) -> ModuleNode:
    """n_groups bottlenecks wrapped in a module chain of fixed height."""
    groups = [inverted_residual(f"g{i}", 8, 32, 8, 2) for i in range(n_groups)]
    node = ModuleNode("inner", tuple(groups))
    for d in range(chain_depth):
        node = ModuleNode(f"wrap{d}", (node,))
    return ModuleNode("root", (node,))


def test_operation_count_grows_linearly_in_layer_count():
    counts = {}
    for n_groups in (4, 8, 16, 32):
        net, ops = standardize_with_stats(_deep_tree(n_groups, chain_depth=3))
        layers = sum(len(b.layers) for b in net.blocks)
        counts[layers] = ops
    sizes = sorted(counts)
    # doubling the layer count should roughly double the work at fixed height
    for a, b in zip(sizes, sizes[1:]):
        growth = counts[b] / counts[a]
        assert growth == pytest.approx(b / a, rel=0.35)
