"""Walk a torch module tree and bridge it to the descriptor/weight formats.

The walk follows named_children() recursively, so the exported tree is the
structure the model's author wrote, in declaration order. Leaves (modules
without children) are classified into layer kinds; parameterized leaves the
format cannot represent are exported as opaque and collected in a warning
list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn as nn

from .classify import classify
from .formats import ROLES, descriptor_bytes, read_weights, weights_bytes

PARAM_KINDS = {"conv2d", "batchnorm2d", "linear"}


@dataclass
class ExportResult:
    descriptor: bytes
    weights: bytes
    warnings: list[str] = field(default_factory=list)


@dataclass
class Leaf:
    path: str
    module: nn.Module
    kind: str


def iter_leaves(model: nn.Module, overrides: dict[str, str] | None = None):
    """Yield leaves in declaration order, paths rooted below the model itself."""

    def walk(module: nn.Module, path: str):
        children = list(module.named_children())
        if not children:
            yield Leaf(path, module, classify(module, overrides))
            return
        for name, child in children:
            child_path = f"{path}/{name}" if path else name
            yield from walk(child, child_path)

    yield from walk(model, "")


def _leaf_tensors(leaf: Leaf, warnings: list[str]) -> dict[str, torch.Tensor]:
    module = leaf.module
    tensors: dict[str, torch.Tensor] = {}
    if leaf.kind in PARAM_KINDS:
        for role in ROLES:
            value = getattr(module, role, None)
            if isinstance(value, torch.Tensor):
                tensors[role] = value
        return tensors
    if leaf.kind == "opaque":
        named = list(module.named_parameters(recurse=False)) + list(
            module.named_buffers(recurse=False)
        )
        for name, value in named:
            if name in ROLES:
                tensors[name] = value
            else:
                warnings.append(
                    f"{leaf.path}: opaque {type(module).__name__} tensor {name!r} not exported"
                )
        if tensors or named:
            warnings.append(
                f"{leaf.path}: parameterized {type(module).__name__} exported as opaque"
            )
    return tensors


def _tree_node(model: nn.Module, overrides, tensors_out, warnings) -> dict:
    def node_for(module: nn.Module, name: str, path: str) -> dict:
        children = list(module.named_children())
        if children:
            extra = list(module.named_parameters(recurse=False))
            if extra:
                warnings.append(
                    f"{path or name}: container carries direct parameters "
                    f"{[n for n, _ in extra]}; not exported"
                )
            return {
                "name": name,
                "kind": "module",
                "children": [
                    node_for(child, cname, f"{path}/{cname}" if path else cname)
                    for cname, child in children
                ],
            }
        leaf = Leaf(path, module, classify(module, overrides))
        tensors = _leaf_tensors(leaf, warnings)
        for role, value in tensors.items():
            tensors_out[f"{path}/{role}"] = value.detach().cpu().numpy().astype(np.float32)
        params = {
            role: (list(tensors[role].shape) if role in tensors else None) for role in ROLES
        }
        return {"name": name, "kind": "layer", "layer_type": leaf.kind, "params": params}

    root_name = type(model).__name__.lower()
    children = [
        node_for(child, cname, cname) for cname, child in model.named_children()
    ]
    return {"name": root_name, "kind": "module", "children": children}


def export_model(
    model: nn.Module, name: str, overrides: dict[str, str] | None = None
) -> ExportResult:
    """Serialize a model's structure and state into descriptor/weight bytes."""
    warnings: list[str] = []
    tensors: dict[str, np.ndarray] = {}
    root = _tree_node(model, overrides, tensors, warnings)
    root["name"] = name
    return ExportResult(
        descriptor=descriptor_bytes(name, root),
        weights=weights_bytes(tensors),
        warnings=warnings,
    )


@dataclass
class ImportReport:
    assigned: list[str] = field(default_factory=list)
    unmatched: list[str] = field(default_factory=list)  # stored keys with no model tensor
    missing: list[str] = field(default_factory=list)  # model tensors the store lacks


def import_weights(
    model: nn.Module, data: bytes, overrides: dict[str, str] | None = None
) -> ImportReport:
    """Write every manifest tensor into the model; keys with no matching
    module tensor are reported, shape mismatches raise."""
    stored = read_weights(data)
    report = ImportReport()
    targets: dict[str, torch.Tensor] = {}
    aux: list[str] = []
    for leaf in iter_leaves(model, overrides):
        for role, value in _leaf_tensors(leaf, aux).items():
            targets[f"{leaf.path}/{role}"] = value
    with torch.no_grad():
        for key in sorted(stored):
            tensor = targets.get(key)
            if tensor is None:
                report.unmatched.append(key)
                continue
            if tuple(tensor.shape) != stored[key].shape:
                raise ValueError(
                    f"shape mismatch at {key!r}: model {tuple(tensor.shape)} "
                    f"vs stored {stored[key].shape}"
                )
            tensor.copy_(torch.from_numpy(stored[key]))
            report.assigned.append(key)
    report.missing = sorted(set(targets) - set(stored))
    return report
