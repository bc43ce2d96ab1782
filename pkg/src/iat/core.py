"""Domain types for architectures, layers, tensors, blocks and matchings.

All types are immutable after construction and safe to share across threads.
Layer paths are slash-joined module names from the root (root name excluded),
so they double as flat addressing keys for weight stores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterator, Mapping, Union

import numpy as np

PATH_SEP = "/"


class LayerKind(str, Enum):
    CONV2D = "conv2d"
    BATCHNORM2D = "batchnorm2d"
    LINEAR = "linear"
    ACTIVATION = "activation"
    POOL = "pool"
    IDENTITY = "identity"
    # Unknown layer types map here; opaque layers are never matched.
    OPAQUE = "opaque"

    @property
    def is_parameterized(self) -> bool:
        return self in _PARAMETERIZED_KINDS

    @property
    def is_matchable(self) -> bool:
        """Kinds that can take part in matching (carry a weight tensor)."""
        return self in _PARAMETERIZED_KINDS


_PARAMETERIZED_KINDS = frozenset(
    {LayerKind.CONV2D, LayerKind.BATCHNORM2D, LayerKind.LINEAR}
)

# Expected weight tensor rank per parameterized kind.
WEIGHT_RANK = {
    LayerKind.CONV2D: 4,
    LayerKind.LINEAR: 2,
    LayerKind.BATCHNORM2D: 1,
}


class TensorRole(str, Enum):
    WEIGHT = "weight"
    BIAS = "bias"
    RUNNING_MEAN = "running_mean"
    RUNNING_VAR = "running_var"


ROLE_ORDER = (
    TensorRole.WEIGHT,
    TensorRole.BIAS,
    TensorRole.RUNNING_MEAN,
    TensorRole.RUNNING_VAR,
)


@dataclass(frozen=True)
class TensorSpec:
    role: TensorRole
    shape: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(d) for d in self.shape))

    @property
    def numel(self) -> int:
        return math.prod(self.shape)


@dataclass(frozen=True)
class LayerNode:
    name: str
    kind: LayerKind
    params: tuple[TensorSpec, ...] = ()
    path: str = ""

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    def spec(self, role: TensorRole) -> TensorSpec | None:
        for p in self.params:
            if p.role == role:
                return p
        return None

    @property
    def weight(self) -> TensorSpec | None:
        return self.spec(TensorRole.WEIGHT)


@dataclass(frozen=True)
class ModuleNode:
    name: str
    children: tuple[Union["ModuleNode", LayerNode], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class ArchDescriptor:
    name: str
    root: ModuleNode
    format_version: int = 1

    def layers(self) -> Iterator[LayerNode]:
        """Leaves in depth-first (declaration) order."""
        yield from iter_layers(self.root)


def iter_layers(node: ModuleNode | LayerNode) -> Iterator[LayerNode]:
    if isinstance(node, LayerNode):
        yield node
        return
    for child in node.children:
        yield from iter_layers(child)


@dataclass(frozen=True)
class Block:
    layers: tuple[LayerNode, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("block must contain at least one layer")

    def matchable_layers(self) -> list[LayerNode]:
        return [l for l in self.layers if l.kind.is_matchable and l.weight is not None]


@dataclass(frozen=True)
class StandardizedNetwork:
    blocks: tuple[Block, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def all_layers(self) -> list[LayerNode]:
        return [l for b in self.blocks for l in b.layers]

    def matchable_layers(self) -> list[LayerNode]:
        return [l for b in self.blocks for l in b.matchable_layers()]


@dataclass(frozen=True)
class LayerMatch:
    target_path: str
    source_path: str
    score: float


@dataclass(frozen=True)
class NetworkMatching:
    """Ordered layer pairs plus the block-level assignment that produced them.

    ``block_pairs`` holds ``((start, stop), source_block)`` entries: the
    half-open range of target block indices assigned to one source block.
    ``network_score`` is the block-level objective; it is None for matchers
    that do not optimize one (bipartite layers / random).
    """

    pairs: tuple[LayerMatch, ...]
    network_score: float | None
    block_pairs: tuple[tuple[tuple[int, int], int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "block_pairs", tuple(self.block_pairs))


class Tensor:
    """Dense float32 tensor with immutable row-major storage."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.ascontiguousarray(data, dtype=np.float32)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def zeros(cls, shape: tuple[int, ...]) -> "Tensor":
        return cls(np.zeros(shape, dtype=np.float32))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def numel(self) -> int:
        return int(self.data.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape})"


def tensor_key(path: str, role: TensorRole | str) -> str:
    role = role.value if isinstance(role, TensorRole) else role
    return f"{path}{PATH_SEP}{role}"


@dataclass(frozen=True)
class WeightStore:
    entries: Mapping[str, Tensor] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def get(self, path: str, role: TensorRole) -> Tensor | None:
        return self.entries.get(tensor_key(path, role))

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def validate(descriptor: ArchDescriptor, weights: WeightStore | None = None) -> list[str]:
    """Check structural invariants; returns violation messages (empty = valid)."""
    violations: list[str] = []
    seen_paths: set[str] = set()

    def walk(node: ModuleNode | LayerNode, prefix: str):
        if PATH_SEP in node.name:
            violations.append(f"name contains '{PATH_SEP}': {node.name!r}")
        if isinstance(node, LayerNode):
            expected = f"{prefix}{node.name}"
            if node.path != expected:
                violations.append(f"layer path {node.path!r} does not match position {expected!r}")
            if node.path in seen_paths:
                violations.append(f"duplicate path {node.path!r}")
            seen_paths.add(node.path)
            _check_layer(node, violations)
            return
        names = [c.name for c in node.children]
        if len(names) != len(set(names)):
            violations.append(f"duplicate sibling names under {prefix or '<root>'!r}")
        for child in node.children:
            walk(child, f"{prefix}{node.name}{PATH_SEP}" if node is not descriptor.root else "")

    walk(descriptor.root, "")

    if weights is not None:
        specs = {
            tensor_key(l.path, p.role): p
            for l in descriptor.layers()
            for p in l.params
        }
        for key, tensor in weights.entries.items():
            spec = specs.get(key)
            if spec is None:
                violations.append(f"orphan tensor {key!r}")
            elif tensor.shape != spec.shape:
                violations.append(
                    f"shape mismatch for {key!r}: store {tensor.shape} vs descriptor {spec.shape}"
                )
    return violations


def _check_layer(layer: LayerNode, violations: list[str]):
    if not layer.kind.is_parameterized and layer.kind != LayerKind.OPAQUE and layer.params:
        violations.append(f"{layer.kind.value} layer {layer.path!r} must not carry parameters")
    roles = [p.role for p in layer.params]
    if len(roles) != len(set(roles)):
        violations.append(f"duplicate tensor roles on {layer.path!r}")
    for p in layer.params:
        if not p.shape or any(d < 1 for d in p.shape):
            violations.append(f"bad shape {p.shape} on {tensor_key(layer.path, p.role)!r}")
    if layer.kind in WEIGHT_RANK:
        w = layer.weight
        if w is not None and len(w.shape) != WEIGHT_RANK[layer.kind]:
            violations.append(
                f"{layer.kind.value} weight must have {WEIGHT_RANK[layer.kind]} dims, "
                f"got {len(w.shape)} on {layer.path!r}"
            )
    if layer.kind == LayerKind.BATCHNORM2D:
        for p in layer.params:
            if len(p.shape) != 1:
                violations.append(
                    f"batchnorm2d {p.role.value} must have 1 dim, got {len(p.shape)} on {layer.path!r}"
                )
