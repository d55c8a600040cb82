"""Standalone CFGE writer.

The engine consumes embeddings through this file format, so the adapter
carries its own serializer instead of importing engine code. Layout
(little-endian, no padding): magic ``CFGE``, version u16 = 1, space u8
(0 texture / 1 shape), dim u32, count u64, then per record id_len u16,
UTF-8 id, dim float32 components. Records go out in lexicographic id order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"CFGE"
VERSION = 1
SPACE_TEXTURE = 0
SPACE_SHAPE = 1

_HEADER = struct.Struct("<4sHBIQ")
_ID_LEN = struct.Struct("<H")


def write_cfge(destination: str | Path, space: int, records: dict[str, np.ndarray]) -> int:
    """Write id -> float32 vector records; returns the embedding dim."""
    if space not in (SPACE_TEXTURE, SPACE_SHAPE):
        raise ValueError(f"space byte must be 0 or 1, got {space}")
    ids = sorted(records)
    dims = {len(np.asarray(records[i]).reshape(-1)) for i in ids}
    if len(dims) > 1:
        raise ValueError(f"records disagree on dim: {sorted(dims)}")
    dim = dims.pop() if dims else 0
    if dim == 0:
        raise ValueError("cannot write an embedding file with dim 0")

    parts = [_HEADER.pack(MAGIC, VERSION, space, dim, len(ids))]
    for image_id in ids:
        id_bytes = image_id.encode("utf-8")
        vector = np.asarray(records[image_id], dtype="<f4").reshape(-1)
        if not np.all(np.isfinite(vector)):
            raise ValueError(f"non-finite component in record {image_id!r}")
        parts.append(_ID_LEN.pack(len(id_bytes)))
        parts.append(id_bytes)
        parts.append(vector.tobytes())
    Path(destination).write_bytes(b"".join(parts))
    return dim
