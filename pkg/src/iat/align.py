"""Sequence alignment primitives shared by layer- and block-level matching.

The central aligner assigns to each source element a contiguous run of
target elements; runs are disjoint and order-preserving (edges never
cross). A run of length d contributes its summed pair score divided by
sqrt(d), which rewards spreading matches over many source elements while
still letting one source element cover several targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Assignment = tuple[tuple[int, tuple[int, int]], ...]


@dataclass(frozen=True)
class ScoreTable:
    """Pairwise scores, row = target element, column = source element."""

    scores: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("score table must be 2-dimensional")
        if arr.size and (not np.isfinite(arr).all() or (arr < 0).any()):
            raise ValueError("scores must be finite and non-negative")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "scores", arr)

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    @property
    def m(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class DPResult:
    """Alignment value plus the chosen runs.

    ``assignment`` entries are ``(source_index, (start, stop))`` with a
    half-open target range, ordered by target position; source indices
    strictly increase.
    """

    value: float
    assignment: Assignment


_SKIP_SOURCE = -1
_SKIP_TARGET = -2


def dp_match(table: ScoreTable) -> DPResult:
    """Optimal penalized alignment in O(n^2 m) time.

    Ties prefer taking a run over skipping a target over skipping a
    source, and among runs the shortest one.
    """
    n, m = table.n, table.m
    if n == 0 or m == 0:
        return DPResult(0.0, ())

    inv_sqrt = [0.0] + [1.0 / math.sqrt(d) for d in range(1, n + 1)]
    cols = table.scores.T.tolist()
    # dp and actions stored per source column; action >= 1 encodes the run
    # start k (1-based), negative values encode skips.
    dp_cols = [[0.0] * (n + 1)]
    act_cols = [[0] * (n + 1)]
    for j in range(1, m + 1):
        col = cols[j - 1]
        prev = dp_cols[j - 1]
        cur = [0.0] * (n + 1)
        act = [0] * (n + 1)
        for i in range(1, n + 1):
            best_val = -1.0
            best_k = 0
            run = 0.0
            for k in range(i, 0, -1):
                run += col[k - 1]
                v = run * inv_sqrt[i - k + 1] + prev[k - 1]
                if v > best_val:
                    best_val = v
                    best_k = k
            skip_t = cur[i - 1]
            skip_s = prev[i]
            if best_val >= skip_t and best_val >= skip_s:
                cur[i] = best_val
                act[i] = best_k
            elif skip_t >= skip_s:
                cur[i] = skip_t
                act[i] = _SKIP_TARGET
            else:
                cur[i] = skip_s
                act[i] = _SKIP_SOURCE
        dp_cols.append(cur)
        act_cols.append(act)

    assignment = []
    i, j = n, m
    while i > 0 and j > 0:
        a = act_cols[j][i]
        if a == _SKIP_SOURCE:
            j -= 1
        elif a == _SKIP_TARGET:
            i -= 1
        else:
            assignment.append((j - 1, (a - 1, i)))
            i = a - 1
            j -= 1
    assignment.reverse()
    return DPResult(dp_cols[m][n], tuple(assignment))


BRUTE_FORCE_LIMIT = 6


def brute_force_match(table: ScoreTable) -> DPResult:
    """Exhaustive search over every disjoint, ordered run assignment.

    Independent reference for dp_match; only the value is canonical,
    tie assignments may differ.
    """
    n, m = table.n, table.m
    if n > BRUTE_FORCE_LIMIT or m > BRUTE_FORCE_LIMIT:
        raise ValueError("oracle limit exceeded")
    scores = table.scores
    best_val = 0.0
    best_asn: list[tuple[int, tuple[int, int]]] = []

    def rec(j: int, pos: int, val: float, asn: list):
        nonlocal best_val, best_asn
        if j == m or pos == n:
            if val > best_val:
                best_val = val
                best_asn = list(asn)
            return
        rec(j + 1, pos, val, asn)
        for start in range(pos, n):
            run = 0.0
            for stop in range(start + 1, n + 1):
                run += scores[stop - 1, j]
                asn.append((j, (start, stop)))
                rec(j + 1, stop, val + run / math.sqrt(stop - start), asn)
                asn.pop()

    rec(0, 0, 0.0, [])
    return DPResult(best_val, tuple(best_asn))


def max_weight_bipartite(weights: np.ndarray) -> list[tuple[int, int]]:
    """Exact maximum-weight bipartite matching via augmenting paths.

    Hungarian algorithm with potentials on the square-padded cost matrix;
    zero-weight pairs are dropped from the result. Deterministic.
    """
    w = np.asarray(weights, dtype=np.float64)
    n, m = w.shape
    if n == 0 or m == 0:
        return []
    size = max(n, m)
    a = np.zeros((size + 1, size + 1))
    a[1 : n + 1, 1 : m + 1] = -w

    INF = math.inf
    u = [0.0] * (size + 1)
    v = [0.0] * (size + 1)
    match_col = [0] * (size + 1)  # column j -> row matched to it
    way = [0] * (size + 1)
    for i in range(1, size + 1):
        match_col[0] = i
        j0 = 0
        minv = [INF] * (size + 1)
        used = [False] * (size + 1)
        while True:
            used[j0] = True
            i0 = match_col[j0]
            delta = INF
            j1 = 0
            row = a[i0]
            for j in range(1, size + 1):
                if used[j]:
                    continue
                cur = row[j] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(size + 1):
                if used[j]:
                    u[match_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_col[j0] = match_col[j1]
            j0 = j1

    pairs = []
    for j in range(1, size + 1):
        i = match_col[j]
        if 1 <= i <= n and j <= m and w[i - 1, j - 1] > 0:
            pairs.append((i - 1, j - 1))
    pairs.sort()
    return pairs


def drop_crossings(pairs: list[tuple[int, int]], weights: np.ndarray) -> list[tuple[int, int]]:
    """Keep the maximum-weight non-crossing subset of 1:1 pairs.

    Pairs must be sorted by first coordinate; returns pairs whose second
    coordinates strictly increase, maximizing retained weight (weighted
    longest increasing subsequence; ties keep earlier pairs).
    """
    k = len(pairs)
    if k <= 1:
        return list(pairs)
    best = [0.0] * k
    back = [-1] * k
    for a in range(k):
        best[a] = weights[pairs[a][0], pairs[a][1]]
        for b in range(a):
            if pairs[b][1] < pairs[a][1]:
                cand = best[b] + weights[pairs[a][0], pairs[a][1]]
                if cand > best[a]:
                    best[a] = cand
                    back[a] = b
    end = max(range(k), key=lambda idx: (best[idx], -idx))
    kept = []
    while end != -1:
        kept.append(pairs[end])
        end = back[end]
    kept.reverse()
    return kept
