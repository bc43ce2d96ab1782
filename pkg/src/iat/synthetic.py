"""Synthetic architecture descriptors: block fixtures and random CNN generators.

Builders mirror the implementation trees of common CNN families (inverted
residual bottlenecks with squeeze-excite, efficientnet-style stem/stages/head,
rexnet-style linear bottlenecks) at configurable widths, plus plain stacks
and a seeded random generator for property tests and benchmarks.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .core import (
    ArchDescriptor,
    LayerKind,
    LayerNode,
    ModuleNode,
    Tensor,
    TensorRole,
    TensorSpec,
    WeightStore,
    tensor_key,
)


def conv(name: str, out_ch: int, in_ch: int, k: int = 3, bias: bool = False) -> LayerNode:
    params = [TensorSpec(TensorRole.WEIGHT, (out_ch, in_ch, k, k))]
    if bias:
        params.append(TensorSpec(TensorRole.BIAS, (out_ch,)))
    return LayerNode(name, LayerKind.CONV2D, tuple(params), path=name)


def bn(name: str, ch: int) -> LayerNode:
    return LayerNode(
        name,
        LayerKind.BATCHNORM2D,
        (
            TensorSpec(TensorRole.WEIGHT, (ch,)),
            TensorSpec(TensorRole.BIAS, (ch,)),
            TensorSpec(TensorRole.RUNNING_MEAN, (ch,)),
            TensorSpec(TensorRole.RUNNING_VAR, (ch,)),
        ),
        path=name,
    )


def linear(name: str, out_f: int, in_f: int, bias: bool = True) -> LayerNode:
    params = [TensorSpec(TensorRole.WEIGHT, (out_f, in_f))]
    if bias:
        params.append(TensorSpec(TensorRole.BIAS, (out_f,)))
    return LayerNode(name, LayerKind.LINEAR, tuple(params), path=name)


def act(name: str = "act") -> LayerNode:
    return LayerNode(name, LayerKind.ACTIVATION, path=name)


def pool(name: str = "pool") -> LayerNode:
    return LayerNode(name, LayerKind.POOL, path=name)


def identity(name: str = "id") -> LayerNode:
    return LayerNode(name, LayerKind.IDENTITY, path=name)


def descriptor(name: str, children, format_version: int = 1) -> ArchDescriptor:
    """Assemble a descriptor, filling in layer paths from tree position."""
    root = ModuleNode(name, tuple(children))
    return ArchDescriptor(name, _with_paths(root, "", is_root=True), format_version)


def _with_paths(node, prefix: str, is_root: bool = False):
    if isinstance(node, LayerNode):
        return replace(node, path=f"{prefix}{node.name}")
    child_prefix = "" if is_root else f"{prefix}{node.name}/"
    return ModuleNode(node.name, tuple(_with_paths(c, child_prefix) for c in node.children))


def inverted_residual(name: str, in_ch: int, mid_ch: int, out_ch: int, se_ch: int) -> ModuleNode:
    """Bottleneck with squeeze-excite: expands, depthwise-filters, projects."""
    return ModuleNode(
        name,
        (
            conv("conv_pw", mid_ch, in_ch, k=1),
            bn("bn1", mid_ch),
            act("act1"),
            conv("conv_dw", mid_ch, 1, k=3),
            bn("bn2", mid_ch),
            act("act2"),
            ModuleNode(
                "se",
                (
                    conv("conv_reduce", se_ch, mid_ch, k=1, bias=True),
                    act("act1"),
                    conv("conv_expand", mid_ch, se_ch, k=1, bias=True),
                ),
            ),
            conv("conv_pwl", out_ch, mid_ch, k=1),
            bn("bn3", out_ch),
        ),
    )


def depthwise_separable(name: str, in_ch: int, out_ch: int) -> ModuleNode:
    return ModuleNode(
        name,
        (
            conv("conv_dw", in_ch, 1, k=3),
            bn("bn1", in_ch),
            act("act1"),
            conv("conv_pw", out_ch, in_ch, k=1),
            bn("bn2", out_ch),
        ),
    )


def efficientnet_style(
    name: str = "efficientnet_like",
    stem_ch: int = 32,
    stage_widths: tuple[int, ...] = (16, 24, 40),
    stage_depths: tuple[int, ...] = (1, 2, 2),
    head_ch: int = 320,
    classes: int = 100,
    expand: int = 4,
) -> ArchDescriptor:
    """Stem singles, grouped bottleneck stages, head singles and classifier."""
    stages = []
    in_ch = stem_ch
    for si, (width, depth_) in enumerate(zip(stage_widths, stage_depths)):
        blocks = []
        for bi in range(depth_):
            if si == 0 and bi == 0:
                blocks.append(depthwise_separable(str(bi), in_ch, width))
            else:
                mid = in_ch * expand
                blocks.append(inverted_residual(str(bi), in_ch, mid, width, max(mid // 16, 1)))
            in_ch = width
        stages.append(ModuleNode(str(si), tuple(blocks)))
    return descriptor(
        name,
        (
            conv("conv_stem", stem_ch, 3, k=3),
            bn("bn1", stem_ch),
            act("act1"),
            ModuleNode("blocks", tuple(stages)),
            conv("conv_head", head_ch, in_ch, k=1),
            bn("bn2", head_ch),
            act("act2"),
            pool("global_pool"),
            linear("classifier", classes, head_ch),
        ),
    )


def linear_bottleneck(name: str, in_ch: int, mid_ch: int, out_ch: int) -> ModuleNode:
    return ModuleNode(
        name,
        (
            conv("conv_exp", mid_ch, in_ch, k=1),
            bn("bn_exp", mid_ch),
            act("act_exp"),
            conv("conv_dw", mid_ch, 1, k=3),
            bn("bn_dw", mid_ch),
            act("act_dw"),
            conv("conv_proj", out_ch, mid_ch, k=1),
            bn("bn_proj", out_ch),
        ),
    )


def rexnet_style(
    name: str = "rexnet_like",
    stem_ch: int = 32,
    widths: tuple[int, ...] = (16, 27, 38, 50, 61),
    head_ch: int = 256,
    classes: int = 100,
    expand: int = 6,
) -> ArchDescriptor:
    """Stem singles, a flat run of linear bottlenecks, head singles."""
    features = []
    in_ch = stem_ch
    for i, width in enumerate(widths):
        features.append(linear_bottleneck(str(i), in_ch, in_ch * expand, width))
        in_ch = width
    return descriptor(
        name,
        (
            conv("stem_conv", stem_ch, 3, k=3),
            bn("stem_bn", stem_ch),
            act("stem_act"),
            ModuleNode("features", tuple(features)),
            conv("head_conv", head_ch, in_ch, k=1),
            bn("head_bn", head_ch),
            act("head_act"),
            pool("avgpool"),
            linear("fc", classes, head_ch),
        ),
    )


def conv_stack(name: str, channels: tuple[int, ...], k: int = 3, bias: bool = True) -> ArchDescriptor:
    """Flat stack of conv layers: channels = (in, hidden..., out)."""
    layers = [
        conv(f"conv{i}", channels[i + 1], channels[i], k=k, bias=bias)
        for i in range(len(channels) - 1)
    ]
    return descriptor(name, tuple(layers))


def flat_singles(name: str, n_convs: int = 4, ch: int = 8) -> ArchDescriptor:
    """Root that is a plain sequence of single layers."""
    children = []
    in_ch = 3
    for i in range(n_convs):
        children.extend([conv(f"conv{i}", ch, in_ch, k=3), bn(f"bn{i}", ch), act(f"act{i}")])
        in_ch = ch
    children.append(linear("fc", 10, ch))
    return descriptor(name, tuple(children))


def random_cnn(rng: np.random.Generator, name: str = "random_cnn", classes: int = 10) -> ArchDescriptor:
    """Realistic random pyramid CNN: stem, bottleneck stages, head, classifier."""
    stem_ch = int(rng.integers(8, 33))
    n_stages = int(rng.integers(1, 4))
    widths, depths = [], []
    w = stem_ch
    for _ in range(n_stages):
        w = int(w * rng.uniform(1.2, 2.2))
        widths.append(w)
        depths.append(int(rng.integers(1, 4)))
    return efficientnet_style(
        name,
        stem_ch=stem_ch,
        stage_widths=tuple(widths),
        stage_depths=tuple(depths),
        head_ch=int(w * rng.uniform(2, 5)),
        classes=classes,
        expand=int(rng.integers(2, 7)),
    )


def random_weights(desc: ArchDescriptor, rng: np.random.Generator) -> WeightStore:
    entries = {}
    for layer in desc.layers():
        for spec in layer.params:
            entries[tensor_key(layer.path, spec.role)] = Tensor(
                rng.standard_normal(spec.shape).astype(np.float32)
            )
    return WeightStore(entries)
