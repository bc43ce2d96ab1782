"""Collapse a network's module tree into an ordered list of blocks.

The tree is traversed depth-first. Each node returns a list whose elements
are either single layers or lists of layers (nesting depth at most 2). A
child's content is spliced into the parent when it is already block-level
(depth 2) or when it holds at most one conv/linear layer; otherwise the
child's list is kept as one block. After collecting children, a node that
ends up with more single layers than blocks is flattened entirely, unless
it is the root. At the root, each element becomes one Block.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Block, LayerKind, LayerNode, ModuleNode, StandardizedNetwork

RawElement = LayerNode | list[LayerNode]
RawList = list[RawElement]

_CONV_LINEAR = (LayerKind.CONV2D, LayerKind.LINEAR)


@dataclass
class StandardizeStats:
    """Operation counter used to verify the O(n*h) runtime bound."""

    ops: int = 0


def depth(raw: RawList) -> int:
    """Maximal nesting level: 0 empty, 1 layers only, 2 with sub-lists."""
    if not raw:
        return 0
    return 2 if any(isinstance(e, list) for e in raw) else 1


def _conv_linear_count(raw: RawList) -> int:
    count = 0
    for e in raw:
        if isinstance(e, list):
            count += sum(1 for l in e if l.kind in _CONV_LINEAR)
        elif e.kind in _CONV_LINEAR:
            count += 1
    return count


def _collapse(node: ModuleNode | LayerNode, d: int, stats: StandardizeStats) -> RawList:
    if isinstance(node, LayerNode):
        stats.ops += 1
        return [node]

    out: RawList = []
    for child in node.children:
        child_raw = _collapse(child, d + 1, stats)
        if depth(child_raw) > 1 or _conv_linear_count(child_raw) <= 1:
            out.extend(child_raw)
        else:
            out.append(child_raw)
        stats.ops += len(child_raw)

    n_blocks = sum(1 for e in out if isinstance(e, list) and len(e) > 1)
    n_single = len(out) - n_blocks
    if n_blocks < n_single and d > 0:
        flat: RawList = []
        for e in out:
            if isinstance(e, list):
                flat.extend(e)
            else:
                flat.append(e)
        stats.ops += len(flat)
        out = flat
    return out


def standardize_with_stats(root: ModuleNode) -> tuple[StandardizedNetwork, int]:
    stats = StandardizeStats()
    raw = _collapse(root, 0, stats)
    blocks = []
    for e in raw:
        blocks.append(Block(layers=tuple(e) if isinstance(e, list) else (e,)))
    if not blocks:
        raise ValueError("no layers")
    return StandardizedNetwork(blocks=tuple(blocks)), stats.ops


def standardize(root: ModuleNode) -> StandardizedNetwork:
    net, _ = standardize_with_stats(root)
    return net
