"""On-disk formats: architecture descriptor (JSON) and weight container (binary).

Descriptor files are UTF-8 JSON trees of module/layer nodes. Weight files
pack a JSON manifest plus a payload of row-major little-endian f32 tensors,
8-byte aligned and zero-padded in between:

    "IATW" | u32 manifest_length | manifest JSON | payload

Canonical serialization (manifest sorted by key, fixed JSON key order)
is deterministic, so save -> load -> save is byte-identity.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .core import (
    ArchDescriptor,
    LayerKind,
    LayerNode,
    ModuleNode,
    ROLE_ORDER,
    Tensor,
    TensorRole,
    TensorSpec,
    WeightStore,
    validate,
)

__all__ = [
    "ModelIOError",
    "load_descriptor",
    "save_descriptor",
    "load_weights",
    "save_weights",
]

FORMAT_VERSION = 1
MAGIC = b"IATW"
ALIGNMENT = 8


class ModelIOError(ValueError):
    """Format error with a stable machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def load_descriptor(data: bytes | str, opaque_fallback: bool = False) -> ArchDescriptor:
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise ModelIOError("malformed_json", str(e)) from e
    if not isinstance(obj, dict):
        raise ModelIOError("malformed_json", "top-level value must be an object")
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelIOError("unsupported_version", f"format_version {version!r}")
    name = obj.get("name")
    if not isinstance(name, str):
        raise ModelIOError("bad_node", "descriptor name must be a string")
    root_obj = obj.get("root")
    if not isinstance(root_obj, dict) or root_obj.get("kind") != "module":
        raise ModelIOError("bad_node", "root must be a module node")
    root = _parse_node(root_obj, prefix="", opaque_fallback=opaque_fallback, is_root=True)
    descriptor = ArchDescriptor(name=name, root=root, format_version=version)
    violations = validate(descriptor)
    if violations:
        raise ModelIOError("invalid_descriptor", "; ".join(violations))
    return descriptor


def _parse_node(
    obj: dict, prefix: str, opaque_fallback: bool, is_root: bool = False
) -> ModuleNode | LayerNode:
    node_name = obj.get("name")
    if not isinstance(node_name, str):
        raise ModelIOError("bad_node", f"node name must be a string, got {node_name!r}")
    kind = obj.get("kind")
    if kind == "module":
        children_obj = obj.get("children")
        if not isinstance(children_obj, list):
            raise ModelIOError("bad_node", f"module {node_name!r} must carry a children list")
        # Layer paths exclude the root module's name.
        child_prefix = "" if is_root else f"{prefix}{node_name}/"
        names = set()
        children = []
        for child in children_obj:
            if not isinstance(child, dict):
                raise ModelIOError("bad_node", f"child of {node_name!r} is not an object")
            cname = child.get("name")
            if cname in names:
                raise ModelIOError("duplicate_path", f"duplicate sibling name {cname!r} under {node_name!r}")
            names.add(cname)
            children.append(_parse_node(child, child_prefix, opaque_fallback))
        return ModuleNode(node_name, tuple(children))
    if kind == "layer":
        raw_type = obj.get("layer_type")
        try:
            layer_type = LayerKind(raw_type)
        except ValueError:
            if opaque_fallback:
                layer_type = LayerKind.OPAQUE
            else:
                raise ModelIOError("unknown_layer_type", f"{raw_type!r} on {node_name!r}") from None
        params_obj = obj.get("params") or {}
        if not isinstance(params_obj, dict):
            raise ModelIOError("bad_node", f"params of {node_name!r} must be an object")
        unknown = set(params_obj) - {r.value for r in ROLE_ORDER}
        if unknown:
            raise ModelIOError("bad_node", f"unknown param roles {sorted(unknown)} on {node_name!r}")
        params = []
        for role in ROLE_ORDER:
            shape = params_obj.get(role.value)
            if shape is None:
                continue
            if not isinstance(shape, list) or not all(isinstance(d, int) for d in shape):
                raise ModelIOError("bad_node", f"{role.value} shape of {node_name!r} must be a list of ints")
            params.append(TensorSpec(role, tuple(shape)))
        return LayerNode(node_name, layer_type, tuple(params), path=f"{prefix}{node_name}")
    raise ModelIOError("bad_node", f"unknown node kind {kind!r} on {node_name!r}")


def _node_to_obj(node: ModuleNode | LayerNode) -> dict:
    if isinstance(node, LayerNode):
        params = {}
        for role in ROLE_ORDER:
            spec = node.spec(role)
            params[role.value] = list(spec.shape) if spec is not None else None
        return {
            "name": node.name,
            "kind": "layer",
            "layer_type": node.kind.value,
            "params": params,
        }
    return {
        "name": node.name,
        "kind": "module",
        "children": [_node_to_obj(c) for c in node.children],
    }


def save_descriptor(descriptor: ArchDescriptor) -> bytes:
    obj = {
        "format_version": descriptor.format_version,
        "name": descriptor.name,
        "root": _node_to_obj(descriptor.root),
    }
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def save_weights(store: WeightStore) -> bytes:
    manifest = []
    chunks = []
    offset = 0
    for key, tensor in sorted(store.entries.items()):
        pad = (-offset) % ALIGNMENT
        if pad:
            chunks.append(b"\x00" * pad)
            offset += pad
        raw = np.ascontiguousarray(tensor.data, dtype="<f4").tobytes()
        manifest.append({"key": key, "dtype": "f32", "shape": list(tensor.shape), "offset": offset})
        chunks.append(raw)
        offset += len(raw)
    manifest_bytes = json.dumps(manifest, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    return MAGIC + struct.pack("<I", len(manifest_bytes)) + manifest_bytes + b"".join(chunks)


def load_weights(data: bytes) -> WeightStore:
    if len(data) < 8 or data[:4] != MAGIC:
        raise ModelIOError("bad_magic", "not a weight container")
    (manifest_len,) = struct.unpack_from("<I", data, 4)
    header_end = 8 + manifest_len
    if header_end > len(data):
        raise ModelIOError("truncated", "manifest extends past end of file")
    try:
        manifest = json.loads(data[8:header_end].decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ModelIOError("bad_manifest", str(e)) from e
    if not isinstance(manifest, list):
        raise ModelIOError("bad_manifest", "manifest must be an array")

    payload = data[header_end:]
    entries: dict[str, Tensor] = {}
    extents = []
    for item in manifest:
        if not isinstance(item, dict):
            raise ModelIOError("bad_manifest", "manifest entry is not an object")
        key = item.get("key")
        dtype = item.get("dtype")
        shape = item.get("shape")
        offset = item.get("offset")
        if not isinstance(key, str) or not isinstance(shape, list) or not isinstance(offset, int):
            raise ModelIOError("bad_manifest", f"malformed entry {item!r}")
        if key in entries:
            raise ModelIOError("bad_manifest", f"duplicate key {key!r}")
        if dtype != "f32":
            raise ModelIOError("bad_dtype", f"{dtype!r} on {key!r}")
        if any(not isinstance(d, int) or d < 1 for d in shape):
            raise ModelIOError("bad_manifest", f"bad shape {shape!r} on {key!r}")
        if offset % ALIGNMENT != 0:
            raise ModelIOError("alignment", f"offset {offset} of {key!r} not {ALIGNMENT}-byte aligned")
        numel = int(np.prod(shape, dtype=np.int64))
        nbytes = 4 * numel
        if offset + nbytes > len(payload):
            raise ModelIOError("truncated", f"payload too short for {key!r}")
        extents.append((offset, offset + nbytes, key))
        arr = np.frombuffer(payload, dtype="<f4", count=numel, offset=offset).reshape(shape)
        entries[key] = Tensor(arr)

    extents.sort()
    for (s1, e1, k1), (s2, e2, k2) in zip(extents, extents[1:]):
        if e1 > s2:
            raise ModelIOError("overlap", f"{k1!r} overlaps {k2!r}")
    return WeightStore(entries)
