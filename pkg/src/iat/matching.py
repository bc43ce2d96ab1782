"""Network-level matching: block alignment plus per-block layer matching.

Matching runs in two phases. Phase one scores every (target block, source
block) pair by aligning the layers inside them. Phase two aligns the block
sequences using those scores, and the layer matchings of the chosen block
pairs are concatenated. Variant matchers swap the aligner at one or both
levels; all of them preserve the type gate and never reuse a target layer.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .align import (
    DPResult,
    ScoreTable,
    brute_force_match,
    dp_match,
    drop_crossings,
    max_weight_bipartite,
)
from .core import LayerMatch, LayerNode, NetworkMatching, StandardizedNetwork
from .scoring import block_pair_score, score_table, shape_score

__all__ = [
    "MATCHERS",
    "ScoreTable",
    "DPResult",
    "dp_match",
    "brute_force_match",
    "max_weight_bipartite",
    "match_networks",
    "matching_violations",
]

MATCHERS = ("dp", "bipartite", "nbipartite", "random")


def _phase1(
    target: StandardizedNetwork,
    source: StandardizedNetwork,
    max_workers: int | None = None,
) -> tuple[np.ndarray, dict[tuple[int, int], list[LayerMatch]]]:
    """Score every block pair; pairs are independent and may run concurrently."""
    n, m = len(target.blocks), len(source.blocks)
    scores = np.zeros((n, m))
    matches: dict[tuple[int, int], list[LayerMatch]] = {}

    def fill(cell: tuple[int, int]):
        i, j = cell
        s, lm = block_pair_score(target.blocks[i], source.blocks[j])
        scores[i, j] = s
        matches[i, j] = lm

    cells = [(i, j) for i in range(n) for j in range(m)]
    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            list(pool.map(fill, cells))
    else:
        for cell in cells:
            fill(cell)
    return scores, matches


def _bipartite_layer_pairs(t_layers: list[LayerNode], s_layers: list[LayerNode]) -> list[LayerMatch]:
    table = score_table(t_layers, s_layers).scores
    pairs = drop_crossings(max_weight_bipartite(table), table)
    return [
        LayerMatch(t_layers[i].path, s_layers[j].path, float(table[i, j])) for i, j in pairs
    ]


def match_networks(
    target: StandardizedNetwork,
    source: StandardizedNetwork,
    matcher: str = "dp",
    seed: int = 0,
    max_workers: int | None = None,
) -> NetworkMatching:
    if matcher not in MATCHERS:
        raise ValueError(f"unknown matcher {matcher!r}")
    if not target.blocks or not source.blocks:
        raise ValueError("empty network")

    if matcher == "random":
        return _random_matching(target, source, seed)

    block_scores, layer_matches = _phase1(target, source, max_workers)

    if matcher in ("dp", "bipartite"):
        block_result = dp_match(ScoreTable(block_scores))
        block_pairs = []
        for j, (start, stop) in block_result.assignment:
            if block_scores[start:stop, j].sum() > 0:
                block_pairs.append(((start, stop), j))
        network_score = block_result.value if matcher == "dp" else None
    else:  # nbipartite: blocks matched 1:1 by bipartite weight
        kept = drop_crossings(max_weight_bipartite(block_scores), block_scores)
        block_pairs = [((i, i + 1), j) for i, j in kept]
        network_score = float(sum(block_scores[i, j] for i, j in kept))

    pairs: list[LayerMatch] = []
    for (start, stop), j in block_pairs:
        for i in range(start, stop):
            if block_scores[i, j] <= 0:
                continue
            if matcher == "dp":
                pairs.extend(layer_matches[i, j])
            else:
                pairs.extend(
                    _bipartite_layer_pairs(
                        target.blocks[i].matchable_layers(),
                        source.blocks[j].matchable_layers(),
                    )
                )
    return NetworkMatching(tuple(pairs), network_score, tuple(block_pairs))


def _random_matching(
    target: StandardizedNetwork, source: StandardizedNetwork, seed: int
) -> NetworkMatching:
    rng = random.Random(seed)
    by_type: dict[tuple, list[LayerNode]] = {}
    for layer in source.matchable_layers():
        key = (layer.kind, len(layer.weight.shape))
        by_type.setdefault(key, []).append(layer)
    pairs = []
    for layer in target.matchable_layers():
        candidates = by_type.get((layer.kind, len(layer.weight.shape)))
        if not candidates:
            continue
        chosen = candidates[rng.randrange(len(candidates))]
        pairs.append(LayerMatch(layer.path, chosen.path, shape_score(layer, chosen)))
    return NetworkMatching(tuple(pairs), None, ())


def _layer_positions(net: StandardizedNetwork) -> dict[str, tuple[int, int, LayerNode]]:
    pos = {}
    for b, block in enumerate(net.blocks):
        for l, layer in enumerate(block.layers):
            pos[layer.path] = (b, l, layer)
    return pos


def matching_violations(
    matching: NetworkMatching,
    target: StandardizedNetwork,
    source: StandardizedNetwork,
    require_noncrossing: bool = True,
) -> list[str]:
    """Structural checks: injectivity on targets, type gate, positive scores,
    and (optionally) that edges never cross at block level or inside a
    block pair."""
    problems = []
    tpos = _layer_positions(target)
    spos = _layer_positions(source)
    seen_targets = set()
    placed: list[tuple[int, int, int, int]] = []  # (tb, tl, sb, sl)
    for p in matching.pairs:
        if p.target_path not in tpos:
            problems.append(f"unknown target layer {p.target_path!r}")
            continue
        if p.source_path not in spos:
            problems.append(f"unknown source layer {p.source_path!r}")
            continue
        if p.target_path in seen_targets:
            problems.append(f"target layer matched twice: {p.target_path!r}")
        seen_targets.add(p.target_path)
        tb, tl, tlayer = tpos[p.target_path]
        sb, sl, slayer = spos[p.source_path]
        if tlayer.kind != slayer.kind:
            problems.append(f"type gate violated: {p.target_path!r} vs {p.source_path!r}")
        if not (0 < p.score <= 1):
            problems.append(f"score out of range on {p.target_path!r}: {p.score}")
        placed.append((tb, tl, sb, sl))

    if require_noncrossing:
        block_of = {}
        for tb, _, sb, _ in placed:
            if block_of.setdefault(tb, sb) != sb:
                problems.append(f"target block {tb} matched to multiple source blocks")
        ordered = sorted(block_of.items())
        for (tb1, sb1), (tb2, sb2) in zip(ordered, ordered[1:]):
            if sb1 > sb2:
                problems.append(f"block edges cross: {tb1}->{sb1} after {tb2}->{sb2}")
        placed.sort(key=lambda x: (x[0], x[1]))
        for a, b in zip(placed, placed[1:]):
            if a[0] == b[0] and a[2] == b[2] and a[3] > b[3]:
                problems.append(
                    f"layer edges cross inside block pair ({a[0]}, {a[2]}): "
                    f"{a[1]}->{a[3]} after {b[1]}->{b[3]}"
                )
    return problems
