"""Tensor-level parameter movement between matched layers.

Operators differ only in how each dimension of the source is mapped onto
the target: clip takes the center crop of the larger extent, full tiles
the source when the target is wider, magnitude keeps the highest-|L1|
source slices, and clipnorm rescales the clip copy to preserve activation
variance. The index selection computed for a weight's output dimension is
reused for the layer's bias and running statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import NetworkMatching, Tensor, TensorRole, WeightStore, tensor_key

__all__ = [
    "TransferOperator",
    "TransferReport",
    "TensorTransfer",
    "crop_index",
    "clip_transfer",
    "full_transfer",
    "magnitude_transfer",
    "clipnorm_transfer",
    "apply_transfer",
    "fan_in",
]


class TransferOperator(str, Enum):
    CLIP = "clip"
    FULL = "full"
    MAGNITUDE = "magnitude"
    CLIPNORM = "clipnorm"


def crop_index(j: int, x: int, y: int) -> int:
    """Map 1-based position j of the smaller extent into an extent of size x,
    center-aligned against an extent of size y."""
    if not 1 <= j <= min(x, y):
        raise ValueError(f"index {j} out of range for sizes ({x}, {y})")
    if x > y:
        return j + (x - y) // 2
    return j


def _center_indices(own: int, other: int) -> np.ndarray:
    size = min(own, other)
    off = (own - other) // 2 if own > other else 0
    return np.arange(off, off + size)


def _clip_dim(t: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    return _center_indices(t, s), _center_indices(s, t)


def _full_dim(t: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    if t <= s:
        return _clip_dim(t, s)
    return np.arange(t), np.arange(t) % s


def _magnitude_dim(t: int, s: int, source: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    if s <= t:
        return _clip_dim(t, s)
    other_axes = tuple(a for a in range(source.ndim) if a != axis)
    l1 = np.abs(source).sum(axis=other_axes) if other_axes else np.abs(source)
    top = np.argsort(-l1, kind="stable")[:t]  # stable: ties keep lower index
    return _center_indices(t, t), np.sort(top)


def _check_ranks(target: Tensor, source: Tensor):
    if len(target.shape) != len(source.shape):
        raise ValueError(
            f"rank mismatch: target {target.shape} vs source {source.shape}"
        )


def _gather_scatter(
    target: Tensor,
    source: Tensor,
    dims: list[tuple[np.ndarray, np.ndarray]],
    scale: float = 1.0,
) -> Tensor:
    out = target.data.copy()
    tgt_idx = np.ix_(*(d[0] for d in dims))
    src_idx = np.ix_(*(d[1] for d in dims))
    patch = source.data[src_idx]
    if scale != 1.0:
        patch = patch * np.float32(scale)
    out[tgt_idx] = patch
    return Tensor(out)


def clip_transfer(target: Tensor, source: Tensor) -> Tensor:
    _check_ranks(target, source)
    dims = [_clip_dim(t, s) for t, s in zip(target.shape, source.shape)]
    return _gather_scatter(target, source, dims)


def full_transfer(target: Tensor, source: Tensor) -> Tensor:
    _check_ranks(target, source)
    dims = [_full_dim(t, s) for t, s in zip(target.shape, source.shape)]
    return _gather_scatter(target, source, dims)


def magnitude_transfer(target: Tensor, source: Tensor) -> Tensor:
    _check_ranks(target, source)
    dims = [
        _magnitude_dim(t, s, source.data, axis)
        for axis, (t, s) in enumerate(zip(target.shape, source.shape))
    ]
    return _gather_scatter(target, source, dims)


def clipnorm_transfer(
    target: Tensor, source: Tensor, fan_in_source: int, fan_in_target: int
) -> Tensor:
    _check_ranks(target, source)
    if fan_in_source < 1 or fan_in_target < 1:
        raise ValueError("fan-ins must be >= 1")
    dims = [_clip_dim(t, s) for t, s in zip(target.shape, source.shape)]
    return _gather_scatter(target, source, dims, scale=math.sqrt(fan_in_source / fan_in_target))


def fan_in(weight_shape: tuple[int, ...]) -> int:
    """Inputs feeding one output unit: product of non-output dims."""
    return math.prod(weight_shape[1:]) if len(weight_shape) > 1 else 1


@dataclass(frozen=True)
class TensorTransfer:
    target_key: str
    source_key: str
    copied: int
    fraction: float


@dataclass(frozen=True)
class TransferReport:
    tensors: tuple[TensorTransfer, ...]
    warnings: tuple[str, ...]
    total_copied: int
    total_target_elements: int

    @property
    def overall_fraction(self) -> float:
        if self.total_target_elements == 0:
            return 0.0
        return self.total_copied / self.total_target_elements

    def to_json_dict(self) -> dict:
        return {
            "tensors": [
                {
                    "target": t.target_key,
                    "source": t.source_key,
                    "copied": t.copied,
                    "fraction": t.fraction,
                }
                for t in self.tensors
            ],
            "warnings": list(self.warnings),
            "total_copied": self.total_copied,
            "total_target_elements": self.total_target_elements,
            "overall_fraction": self.overall_fraction,
        }


_SIDE_ROLES = (TensorRole.BIAS, TensorRole.RUNNING_MEAN, TensorRole.RUNNING_VAR)


def apply_transfer(
    matching: NetworkMatching,
    source_weights: WeightStore,
    target_weights: WeightStore,
    op: TransferOperator | str = TransferOperator.CLIP,
) -> tuple[WeightStore, TransferReport]:
    """Move parameters for every matched layer pair; unmatched target tensors
    pass through unchanged."""
    op = TransferOperator(op)
    out = dict(target_weights.entries)
    records: list[TensorTransfer] = []
    warnings: list[str] = []

    for pair in matching.pairs:
        tw = target_weights.get(pair.target_path, TensorRole.WEIGHT)
        sw = source_weights.get(pair.source_path, TensorRole.WEIGHT)
        if tw is None or sw is None:
            warnings.append(
                f"skipped {pair.target_path!r} <- {pair.source_path!r}: missing weight tensor"
            )
            continue
        if len(tw.shape) != len(sw.shape):
            warnings.append(
                f"skipped {pair.target_path!r} <- {pair.source_path!r}: weight rank mismatch"
            )
            continue

        scale = 1.0
        if op == TransferOperator.CLIP:
            dims = [_clip_dim(t, s) for t, s in zip(tw.shape, sw.shape)]
        elif op == TransferOperator.FULL:
            dims = [_full_dim(t, s) for t, s in zip(tw.shape, sw.shape)]
        elif op == TransferOperator.MAGNITUDE:
            dims = [
                _magnitude_dim(t, s, sw.data, axis)
                for axis, (t, s) in enumerate(zip(tw.shape, sw.shape))
            ]
        else:
            dims = [_clip_dim(t, s) for t, s in zip(tw.shape, sw.shape)]
            scale = math.sqrt(fan_in(sw.shape) / fan_in(tw.shape))

        t_key = tensor_key(pair.target_path, TensorRole.WEIGHT)
        out[t_key] = _gather_scatter(tw, sw, dims, scale)
        copied = math.prod(len(d[0]) for d in dims)
        records.append(
            TensorTransfer(t_key, tensor_key(pair.source_path, TensorRole.WEIGHT), copied, copied / tw.numel)
        )

        # Bias and running stats follow the weight's output-dim selection.
        out_dim = dims[0]
        for role in _SIDE_ROLES:
            tb = target_weights.get(pair.target_path, role)
            sb = source_weights.get(pair.source_path, role)
            if tb is None or sb is None:
                continue
            if len(tb.shape) != 1 or len(sb.shape) != 1:
                warnings.append(
                    f"skipped {tensor_key(pair.target_path, role)!r}: expected 1-dim tensor"
                )
                continue
            if tb.shape[0] < out_dim[0].max() + 1 or sb.shape[0] < out_dim[1].max() + 1:
                warnings.append(
                    f"skipped {tensor_key(pair.target_path, role)!r}: size does not match weight output dim"
                )
                continue
            t_role_key = tensor_key(pair.target_path, role)
            out[t_role_key] = _gather_scatter(tb, sb, [out_dim], scale)
            records.append(
                TensorTransfer(
                    t_role_key,
                    tensor_key(pair.source_path, role),
                    len(out_dim[0]),
                    len(out_dim[0]) / tb.numel,
                )
            )

    total_target = sum(t.numel for t in target_weights.entries.values())
    report = TransferReport(
        tensors=tuple(records),
        warnings=tuple(warnings),
        total_copied=sum(r.copied for r in records),
        total_target_elements=total_target,
    )
    return WeightStore(out), report
