"""Inter-architecture knowledge transfer.

Standardize two networks into block lists, match blocks and layers with a
penalized alignment, then move parameters tensor by tensor:

    from iat import standardize, match_networks, apply_transfer

    target = standardize(target_descriptor.root)
    source = standardize(source_descriptor.root)
    matching = match_networks(target, source)
    new_weights, report = apply_transfer(matching, source_weights, target_weights)
"""

from .core import (
    ArchDescriptor,
    Block,
    LayerKind,
    LayerMatch,
    LayerNode,
    ModuleNode,
    NetworkMatching,
    StandardizedNetwork,
    Tensor,
    TensorRole,
    TensorSpec,
    WeightStore,
    tensor_key,
    validate,
)
from .align import DPResult, ScoreTable, brute_force_match, dp_match, max_weight_bipartite
from .matching import MATCHERS, match_networks, matching_violations
from .model_io import (
    ModelIOError,
    load_descriptor,
    load_weights,
    save_descriptor,
    save_weights,
)
from .scoring import block_pair_score, shape_score
from .similarity import directional_similarity, similarity
from .standardize import depth, standardize, standardize_with_stats
from .transfer import (
    TransferOperator,
    TransferReport,
    apply_transfer,
    clip_transfer,
    clipnorm_transfer,
    crop_index,
    fan_in,
    full_transfer,
    magnitude_transfer,
)

__version__ = "0.1.0"
