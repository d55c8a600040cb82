"""Embedding sets for the two retrieval spaces and the CFGE binary container.

CFGE layout (little-endian, no padding): magic ``CFGE`` (4 bytes), version u16,
space u8 (0 = texture, 1 = shape), dim u32, count u64, then per record:
id_len u16, UTF-8 id bytes, dim float32 components. Header is 19 bytes.
Canonical files list records in lexicographic id order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    FormatError,
    SpaceMismatchError,
    TruncatedError,
    ValidationError,
    VersionError,
)
from .gallery import GalleryManifest

CFGE_MAGIC = b"CFGE"
CFGE_VERSION = 1
_HEADER = struct.Struct("<4sHBIQ")  # magic, version, space, dim, count — 19 bytes
_ID_LEN = struct.Struct("<H")

UNIT_NORM_TOLERANCE = 1e-4


class SpaceTag(IntEnum):
    """Which embedding space a vector lives in; the value is the wire byte."""

    TEXTURE = 0
    SHAPE = 1

    @property
    def label(self) -> str:
        return self.name.lower()


def _as_readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Immutable map from image id to a fixed-dimension float32 vector.

    Rows of `matrix` correspond to `ids`, which are always kept in lexicographic
    order — that ordering doubles as the canonical file order and the
    deterministic tie-break order for retrieval. `normalized` is measured from
    the data (every L2 norm within 1e-4 of 1), not carried as external state.
    """

    space: SpaceTag
    dim: int
    ids: tuple[str, ...]
    matrix: np.ndarray
    normalized: bool = field(init=False)
    _row: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"dim must be positive, got {self.dim}")
        if self.matrix.shape != (len(self.ids), self.dim):
            raise ValidationError(
                f"matrix shape {self.matrix.shape} does not match "
                f"({len(self.ids)}, {self.dim})"
            )
        if self.matrix.dtype != np.float32:
            raise ValidationError(f"matrix must be float32, got {self.matrix.dtype}")
        if not np.all(np.isfinite(self.matrix)):
            bad = int(np.flatnonzero(~np.isfinite(self.matrix).all(axis=1))[0])
            raise ValidationError(f"non-finite component in vector {self.ids[bad]!r}")
        if list(self.ids) != sorted(self.ids):
            raise ValidationError("ids must be in lexicographic order")
        object.__setattr__(self, "_row", {image_id: i for i, image_id in enumerate(self.ids)})
        if len(self._row) != len(self.ids):
            raise ValidationError("duplicate image id in embedding set")
        norms = np.linalg.norm(self.matrix.astype(np.float64), axis=1)
        normalized = bool(np.all(np.abs(norms - 1.0) <= UNIT_NORM_TOLERANCE))
        object.__setattr__(self, "normalized", normalized)
        _as_readonly(self.matrix)

    @classmethod
    def from_vectors(
        cls, space: SpaceTag, vectors: Mapping[str, Iterable[float]], dim: int | None = None
    ) -> "EmbeddingSet":
        """Build a set from an id → vector mapping (ids are sorted internally)."""
        ids = tuple(sorted(vectors))
        if dim is None:
            if not ids:
                raise ValidationError("dim is required for an empty embedding set")
            dim = len(np.atleast_1d(np.asarray(vectors[ids[0]])))
        matrix = np.empty((len(ids), dim), dtype=np.float32)
        for i, image_id in enumerate(ids):
            vec = np.asarray(vectors[image_id], dtype=np.float32).reshape(-1)
            if vec.shape != (dim,):
                raise ValidationError(
                    f"vector {image_id!r} has length {vec.shape[0]}, expected {dim}"
                )
            matrix[i] = vec
        return cls(space=space, dim=dim, ids=ids, matrix=matrix)

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._row

    def row_of(self, image_id: str) -> int:
        if image_id not in self._row:
            raise ValidationError(f"id {image_id!r} not in embedding set")
        return self._row[image_id]

    def vector(self, image_id: str) -> np.ndarray:
        return self.matrix[self.row_of(image_id)]


@dataclass(frozen=True)
class QueryEmbedding:
    """A single query vector tagged with its source label and space."""

    source_label: str
    space: SpaceTag
    vector: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.float32).reshape(-1)
        if vec.size == 0:
            raise ValidationError("query vector must be non-empty")
        if not np.all(np.isfinite(vec)):
            raise ValidationError(f"non-finite component in query {self.source_label!r}")
        object.__setattr__(self, "vector", _as_readonly(vec))


def write_embedding_file(embedding_set: EmbeddingSet, destination: str | Path) -> None:
    """Write the set in canonical CFGE form (records in lexicographic id order)."""
    parts = [
        _HEADER.pack(
            CFGE_MAGIC,
            CFGE_VERSION,
            int(embedding_set.space),
            embedding_set.dim,
            len(embedding_set),
        )
    ]
    for i, image_id in enumerate(embedding_set.ids):
        id_bytes = image_id.encode("utf-8")
        if len(id_bytes) > 0xFFFF:
            raise ValidationError(f"id {image_id!r} exceeds the 65535-byte limit")
        parts.append(_ID_LEN.pack(len(id_bytes)))
        parts.append(id_bytes)
        parts.append(embedding_set.matrix[i].astype("<f4").tobytes())
    Path(destination).write_bytes(b"".join(parts))


def read_space_tag(source: str | Path) -> SpaceTag:
    """Peek the space tag of a CFGE file without reading its records."""
    with open(source, "rb") as handle:
        header = handle.read(_HEADER.size)
    if len(header) < _HEADER.size:
        raise TruncatedError(f"{source}: file shorter than the 19-byte header")
    magic, version, space_byte, _dim, _count = _HEADER.unpack(header)
    if magic != CFGE_MAGIC:
        raise FormatError(f"{source}: bad magic {magic!r}")
    if version != CFGE_VERSION:
        raise VersionError(f"{source}: unsupported CFGE version {version}")
    try:
        return SpaceTag(space_byte)
    except ValueError:
        raise FormatError(f"{source}: unknown space byte {space_byte}") from None


def ingest_embedding_file(source: str | Path, expected_space: SpaceTag) -> EmbeddingSet:
    """Parse and validate a CFGE file.

    Rejects files whose space tag differs from `expected_space`. Vector bits are
    preserved exactly. Error kinds: FormatError (magic, trailing bytes, bad
    UTF-8), VersionError, TruncatedError, SpaceMismatchError, ValidationError
    (zero dim, duplicate id, non-finite component).
    """
    data = Path(source).read_bytes()
    if len(data) < _HEADER.size:
        raise TruncatedError(f"{source}: file shorter than the 19-byte header")
    magic, version, space_byte, dim, count = _HEADER.unpack_from(data, 0)
    if magic != CFGE_MAGIC:
        raise FormatError(f"{source}: bad magic {magic!r}")
    if version != CFGE_VERSION:
        raise VersionError(f"{source}: unsupported CFGE version {version}")
    try:
        space = SpaceTag(space_byte)
    except ValueError:
        raise FormatError(f"{source}: unknown space byte {space_byte}") from None
    if space is not expected_space:
        raise SpaceMismatchError(
            f"{source}: file is tagged {space.label}, expected {expected_space.label}"
        )
    if dim == 0:
        raise ValidationError(f"{source}: dim must be positive")

    offset = _HEADER.size
    record_bytes = 4 * dim
    ids: list[str] = []
    vectors: list[np.ndarray] = []
    seen: set[str] = set()
    for index in range(count):
        if offset + _ID_LEN.size > len(data):
            raise TruncatedError(f"{source}: record #{index} truncated in id length")
        (id_len,) = _ID_LEN.unpack_from(data, offset)
        offset += _ID_LEN.size
        if offset + id_len + record_bytes > len(data):
            raise TruncatedError(f"{source}: record #{index} truncated")
        try:
            image_id = data[offset : offset + id_len].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{source}: record #{index} id is not valid UTF-8") from exc
        offset += id_len
        if image_id in seen:
            raise ValidationError(f"{source}: duplicate id {image_id!r}")
        seen.add(image_id)
        vector = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(np.float32)
        offset += record_bytes
        if not np.all(np.isfinite(vector)):
            raise ValidationError(f"{source}: non-finite component in record {image_id!r}")
        ids.append(image_id)
        vectors.append(vector)
    if offset != len(data):
        raise FormatError(f"{source}: {len(data) - offset} trailing bytes after {count} records")

    order = sorted(range(len(ids)), key=lambda i: ids[i])
    matrix = np.empty((len(ids), dim), dtype=np.float32)
    for row, i in enumerate(order):
        matrix[row] = vectors[i]
    return EmbeddingSet(
        space=space, dim=dim, ids=tuple(ids[i] for i in order), matrix=matrix
    )


def l2_normalize(embedding_set: EmbeddingSet) -> EmbeddingSet:
    """Return a copy of the set with every vector scaled to unit L2 norm.

    The input set is unchanged. Zero vectors cannot be normalized and raise a
    ValidationError naming the offending id.
    """
    matrix64 = embedding_set.matrix.astype(np.float64)
    norms = np.linalg.norm(matrix64, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        raise ValidationError(
            f"cannot normalize zero vector {embedding_set.ids[int(zero_rows[0])]!r}"
        )
    matrix = (matrix64 / norms[:, None]).astype(np.float32)
    return EmbeddingSet(
        space=embedding_set.space, dim=embedding_set.dim, ids=embedding_set.ids, matrix=matrix
    )


@dataclass(frozen=True)
class CoverageReport:
    """Ids missing from a set versus its manifest, and ids with no gallery entry."""

    missing: tuple[str, ...]
    extra: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra


def validate_against_manifest(
    embedding_set: EmbeddingSet, manifest: GalleryManifest
) -> CoverageReport:
    """Report the symmetric difference between set ids and manifest ids."""
    manifest_ids = set(manifest.image_ids())
    set_ids = set(embedding_set.ids)
    missing = tuple(sorted(manifest_ids - set_ids))
    extra = tuple(sorted(set_ids - manifest_ids))
    return CoverageReport(missing=missing, extra=extra)
