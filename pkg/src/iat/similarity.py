"""Architecture similarity from matching scores.

A network matched against itself scores exactly its parameterized layer
count, so the matching score normalized by the self-score lands in [0, 1].
The symmetric similarity is the geometric mean of both directions, which
penalizes pairs where one network dwarfs the other.
"""

from __future__ import annotations

import math

from .core import StandardizedNetwork
from .matching import match_networks

__all__ = ["directional_similarity", "similarity"]


def _dp_score(target: StandardizedNetwork, source: StandardizedNetwork) -> float:
    return match_networks(target, source, matcher="dp").network_score


def directional_similarity(a: StandardizedNetwork, b: StandardizedNetwork) -> float:
    """score(a, b) / score(a, a) with a as the target."""
    self_score = _dp_score(a, a)
    if self_score <= 0:
        raise ValueError("undefined self-score: network has no parameterized layers")
    return _dp_score(a, b) / self_score


def similarity(s: StandardizedNetwork, t: StandardizedNetwork) -> float:
    """Geometric mean of both directional scores; symmetric in its arguments."""
    return math.sqrt(directional_similarity(s, t) * directional_similarity(t, s))
