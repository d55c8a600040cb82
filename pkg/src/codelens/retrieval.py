"""Exact nearest-neighbor search over an embedding set and generator-input composition.

Search is brute force by design: galleries stay small enough that exactness is
cheaper than an approximate index, and the evaluation metric presumes it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .embedding import UNIT_NORM_TOLERANCE, EmbeddingSet, QueryEmbedding, SpaceTag
from .errors import SpaceMismatchError, ValidationError
from .gallery import CodeSpace, CodeTuple, GalleryManifest


class DistanceMetric(Enum):
    SQUARED_L2 = "squared_l2"
    COSINE = "cosine"


def pairwise_distances(
    matrix: np.ndarray, vector: np.ndarray, metric: DistanceMetric
) -> np.ndarray:
    """Distance from `vector` to every row of `matrix`, in float64.

    Row-wise elementwise reductions (never BLAS matmul) so each row's value is
    bit-identical to an independent single-pair computation — exhaustive-search
    tie order must be reproducible. Cosine distance is clip(1 - dot, 0, 2) and
    is only meaningful on unit vectors.
    """
    if metric is DistanceMetric.SQUARED_L2:
        return np.sum((matrix - vector) ** 2, axis=1)
    return np.clip(1.0 - np.sum(matrix * vector, axis=1), 0.0, 2.0)


@dataclass(frozen=True)
class GalleryHit:
    """One nearest-neighbor result: rank 0 is the closest candidate."""

    image_id: str
    codes: CodeTuple
    distance: float
    rank: int

    def __post_init__(self):
        if self.distance < 0.0:
            raise ValidationError(f"hit distance must be nonnegative, got {self.distance}")
        if self.rank < 0:
            raise ValidationError(f"hit rank must be nonnegative, got {self.rank}")


def _check_query(query: QueryEmbedding, embedding_set: EmbeddingSet, metric: DistanceMetric):
    if query.space is not embedding_set.space:
        raise SpaceMismatchError(
            f"query {query.source_label!r} is in the {query.space.label} space but the "
            f"set is tagged {embedding_set.space.label}"
        )
    if query.vector.shape[0] != embedding_set.dim:
        raise ValidationError(
            f"query dim {query.vector.shape[0]} does not match set dim {embedding_set.dim}"
        )
    if metric is DistanceMetric.COSINE:
        if not embedding_set.normalized:
            raise ValidationError("cosine distance requires an L2-normalized embedding set")
        norm = float(np.linalg.norm(query.vector.astype(np.float64)))
        if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
            raise ValidationError(
                f"cosine distance requires a unit-norm query; {query.source_label!r} "
                f"has norm {norm:.6g}"
            )


def k_nearest(
    query: QueryEmbedding,
    embedding_set: EmbeddingSet,
    manifest: GalleryManifest,
    k: int,
    metric: DistanceMetric = DistanceMetric.COSINE,
    exclude: set[str] | frozenset[str] | None = None,
) -> list[GalleryHit]:
    """Exact k-nearest search, ascending by distance, ties by ascending image id.

    Returns min(k, candidates) hits; excluded ids are never candidates. The
    result is brute-force-equivalent including tie order.
    """
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    _check_query(query, embedding_set, metric)

    if exclude:
        candidates = np.array(
            [i for i, image_id in enumerate(embedding_set.ids) if image_id not in exclude],
            dtype=np.intp,
        )
    else:
        candidates = np.arange(len(embedding_set), dtype=np.intp)
    if candidates.size == 0:
        raise ValidationError("no candidates to search after exclusion")

    distances = pairwise_distances(
        embedding_set.matrix.astype(np.float64),
        query.vector.astype(np.float64),
        metric,
    )
    # Rows are id-sorted, so a stable sort breaks distance ties by ascending id.
    subset = distances[candidates]
    order = np.argsort(subset, kind="stable")[: min(k, candidates.size)]
    hits = []
    for rank, position in enumerate(order):
        row = int(candidates[position])
        image_id = embedding_set.ids[row]
        hits.append(
            GalleryHit(
                image_id=image_id,
                codes=manifest.lookup(image_id).codes,
                distance=float(subset[position]),
                rank=rank,
            )
        )
    return hits


def predict_texture_code(
    query: QueryEmbedding,
    texture_set: EmbeddingSet,
    manifest: GalleryManifest,
    metric: DistanceMetric = DistanceMetric.COSINE,
) -> GalleryHit:
    """Nearest gallery neighbor of the first input image in the texture space.

    The predicted texture code is `hit.codes.texture`.
    """
    if query.space is not SpaceTag.TEXTURE:
        raise SpaceMismatchError(
            f"texture prediction requires a texture-space query, got {query.space.label}"
        )
    return k_nearest(query, texture_set, manifest, k=1, metric=metric)[0]


def predict_shape_code(
    query: QueryEmbedding,
    shape_set: EmbeddingSet,
    manifest: GalleryManifest,
    metric: DistanceMetric = DistanceMetric.COSINE,
) -> GalleryHit:
    """Nearest gallery neighbor of the second input image in the shape space.

    The predicted shape code is `hit.codes.shape`.
    """
    if query.space is not SpaceTag.SHAPE:
        raise SpaceMismatchError(
            f"shape prediction requires a shape-space query, got {query.space.label}"
        )
    return k_nearest(query, shape_set, manifest, k=1, metric=metric)[0]


@dataclass(frozen=True)
class CodeSelection:
    """The code pair retrieved for a query image pair, with its supporting hits."""

    texture_code: int
    shape_code: int
    texture_hit: GalleryHit
    shape_hit: GalleryHit

    def __post_init__(self):
        if self.texture_code != self.texture_hit.codes.texture:
            raise ValidationError("texture_code must equal the texture hit's texture code")
        if self.shape_code != self.shape_hit.codes.shape:
            raise ValidationError("shape_code must equal the shape hit's shape code")

    @classmethod
    def from_hits(cls, texture_hit: GalleryHit, shape_hit: GalleryHit) -> "CodeSelection":
        return cls(
            texture_code=texture_hit.codes.texture,
            shape_code=shape_hit.codes.shape,
            texture_hit=texture_hit,
            shape_hit=shape_hit,
        )


class NoiseSource(Enum):
    """Where the composed input's noise index comes from."""

    SHAPE_HIT = "shape_hit"
    TEXTURE_HIT = "texture_hit"
    FIXED = "fixed"


@dataclass(frozen=True)
class ComposedInput:
    """A complete generator input assembled from a code selection."""

    codes: CodeTuple


def compose_input(
    selection: CodeSelection,
    space: CodeSpace,
    noise_source: NoiseSource = NoiseSource.SHAPE_HIT,
    fixed_noise: int | None = None,
) -> ComposedInput:
    """Assemble the generator input from the selected codes.

    Shape and texture come from the selection. Background follows the space's
    policy (tied: texture mod n_background; fixed: the pinned index;
    independent: inherited from the texture hit, as the background accompanies
    appearance). Noise defaults to the shape hit's variant so the orientation
    follows the shape match.
    """
    if noise_source is NoiseSource.FIXED:
        if fixed_noise is None or not 0 <= fixed_noise < space.n_noise:
            raise ValidationError(
                f"fixed noise index must lie in [0, {space.n_noise}), got {fixed_noise!r}"
            )
        noise = fixed_noise
    elif noise_source is NoiseSource.SHAPE_HIT:
        noise = selection.shape_hit.codes.noise
    else:
        noise = selection.texture_hit.codes.noise

    background = space.background_for(selection.texture_code)
    if background is None:
        background = selection.texture_hit.codes.background

    codes = CodeTuple(
        background=background,
        shape=selection.shape_code,
        texture=selection.texture_code,
        noise=noise,
    )
    codes.validate(space)
    return ComposedInput(codes=codes)
