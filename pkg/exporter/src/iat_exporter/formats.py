"""Writers/readers for the descriptor (JSON) and weight (IATW) file formats.

Implemented against the published format contract, independently of the
consumer library, so the two sides cross-check each other. The weight
writer is canonical (manifest sorted by key, 8-byte aligned offsets),
making byte-level comparison with the consumer's writer meaningful.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"IATW"
ALIGNMENT = 8
ROLES = ("weight", "bias", "running_mean", "running_var")


def descriptor_bytes(name: str, root_node: dict) -> bytes:
    obj = {"format_version": 1, "name": name, "root": root_node}
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def weights_bytes(tensors: dict[str, np.ndarray]) -> bytes:
    manifest = []
    chunks = []
    offset = 0
    for key in sorted(tensors):
        arr = np.ascontiguousarray(tensors[key], dtype="<f4")
        pad = (-offset) % ALIGNMENT
        if pad:
            chunks.append(b"\x00" * pad)
            offset += pad
        manifest.append(
            {"key": key, "dtype": "f32", "shape": list(arr.shape), "offset": offset}
        )
        chunks.append(arr.tobytes())
        offset += arr.nbytes
    blob = json.dumps(manifest, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    return MAGIC + struct.pack("<I", len(blob)) + blob + b"".join(chunks)


def read_weights(data: bytes) -> dict[str, np.ndarray]:
    if data[:4] != MAGIC:
        raise ValueError("not an IATW container")
    (manifest_len,) = struct.unpack_from("<I", data, 4)
    manifest = json.loads(data[8 : 8 + manifest_len].decode("utf-8"))
    payload = data[8 + manifest_len :]
    out = {}
    for item in manifest:
        numel = int(np.prod(item["shape"], dtype=np.int64))
        arr = np.frombuffer(payload, dtype="<f4", count=numel, offset=item["offset"])
        out[item["key"]] = arr.reshape(item["shape"]).copy()
    return out
