"""Binary network checkpoints.

Layout (all little-endian):
  magic b"RNET" | u32 version | u32 json_len | architecture JSON (UTF-8)
  | u32 layer_count | per layer: u8 tensor_count,
      per tensor: u8 ndim, u32 x ndim shape, float32 data.

Tensors are stored as float32, so a float32 network round-trips bit-exactly.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .layers import Network, layer_from_descriptor

MAGIC = b"RNET"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def save_network(net: Network, path) -> None:
    blob = json.dumps(net.descriptor(), separators=(",", ":")).encode("utf-8")
    parts = [MAGIC, struct.pack("<II", VERSION, len(blob)), blob,
             struct.pack("<I", len(net.layers))]
    for group in net.params:
        parts.append(struct.pack("<B", len(group)))
        for tensor in group:
            t = np.asarray(tensor, dtype="<f4")
            parts.append(struct.pack("<B", t.ndim))
            parts.append(struct.pack(f"<{t.ndim}I", *t.shape))
            parts.append(t.tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_network(path) -> Network:
    raw = Path(path).read_bytes()
    view = memoryview(raw)
    if view[:4] != MAGIC:
        raise CheckpointError(f"{path}: not a network checkpoint (bad magic)")
    version, json_len = struct.unpack_from("<II", view, 4)
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    offset = 12
    desc = json.loads(bytes(view[offset:offset + json_len]).decode("utf-8"))
    offset += json_len
    (layer_count,) = struct.unpack_from("<I", view, offset)
    offset += 4
    layers = [layer_from_descriptor(d) for d in desc["layers"]]
    if len(layers) != layer_count:
        raise CheckpointError(f"{path}: layer count mismatch")
    params = []
    for _ in range(layer_count):
        (tensor_count,) = struct.unpack_from("<B", view, offset)
        offset += 1
        group = []
        for _ in range(tensor_count):
            (ndim,) = struct.unpack_from("<B", view, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}I", view, offset)
            offset += 4 * ndim
            size = int(np.prod(shape, dtype=np.int64)) if ndim else 1
            tensor = np.frombuffer(view, dtype="<f4", count=size, offset=offset).reshape(shape)
            offset += 4 * size
            group.append(tensor.copy())
        params.append(tuple(group))
    return Network(layers, params=params)
