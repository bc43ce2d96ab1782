"""Shape-based layer similarity and block-pair scoring.

Two layers score the product over weight dimensions of min(t/s, s/t):
the fraction of one dimension that maps onto the other. Layers of
different kinds, or without a weight tensor, score zero and are never
matched.
"""

from __future__ import annotations

import numpy as np

from .align import ScoreTable, dp_match
from .core import Block, LayerMatch, LayerNode

__all__ = ["shape_score", "score_table", "block_pair_score"]


def shape_score(target: LayerNode, source: LayerNode) -> float:
    if target.kind != source.kind or not target.kind.is_matchable:
        return 0.0
    t = target.weight
    s = source.weight
    if t is None or s is None or len(t.shape) != len(s.shape):
        return 0.0
    score = 1.0
    for td, sd in zip(t.shape, s.shape):
        score *= min(td / sd, sd / td)
    return score


def score_table(target_layers: list[LayerNode], source_layers: list[LayerNode]) -> ScoreTable:
    table = np.zeros((len(target_layers), len(source_layers)))
    for i, t in enumerate(target_layers):
        for j, s in enumerate(source_layers):
            table[i, j] = shape_score(t, s)
    return ScoreTable(table)


def block_pair_score(target_block: Block, source_block: Block) -> tuple[float, list[LayerMatch]]:
    """Align the parameterized layers of two blocks; zero-score pairs are
    dropped from the returned matching."""
    t_layers = target_block.matchable_layers()
    s_layers = source_block.matchable_layers()
    if not t_layers or not s_layers:
        return 0.0, []
    table = score_table(t_layers, s_layers)
    result = dp_match(table)
    matches = []
    for j, (start, stop) in result.assignment:
        for i in range(start, stop):
            pair = table.scores[i, j]
            if pair > 0:
                matches.append(LayerMatch(t_layers[i].path, s_layers[j].path, float(pair)))
    return result.value, matches
