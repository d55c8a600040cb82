"""Leave-one-out code-prediction accuracy and the nearest-centroid baseline.

Accuracy is the fraction of gallery images whose nearest neighbor (self
excluded; every image is trivially its own zero-distance neighbor otherwise)
carries the same code on the chosen axis. Counts are exact integers; the
accuracy field is their single float division.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .embedding import EmbeddingSet, QueryEmbedding, SpaceTag, validate_against_manifest
from .errors import CoverageError, ValidationError
from .gallery import CodeTuple, GalleryManifest
from .retrieval import DistanceMetric, pairwise_distances


class CodeAxis(Enum):
    SHAPE = "shape"
    TEXTURE = "texture"

    def code_of(self, codes: CodeTuple) -> int:
        return codes.shape if self is CodeAxis.SHAPE else codes.texture

    def count_in(self, manifest: GalleryManifest) -> int:
        space = manifest.code_space
        return space.n_shape if self is CodeAxis.SHAPE else space.n_texture


@dataclass(frozen=True)
class AccuracyReport:
    """Aggregate and per-code-value retrieval accuracy for one embedding set."""

    space: SpaceTag
    code_axis: CodeAxis
    metric: DistanceMetric
    n_queries: int
    n_correct: int
    per_code: dict[int, tuple[int, int]]

    def __post_init__(self):
        if not 0 <= self.n_correct <= self.n_queries:
            raise ValidationError(
                f"n_correct {self.n_correct} outside [0, {self.n_queries}]"
            )
        totals = sum(total for _, total in self.per_code.values())
        if totals != self.n_queries:
            raise ValidationError(
                f"per-code totals sum to {totals}, expected {self.n_queries}"
            )

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_queries

    def per_code_accuracy(self, code: int) -> float:
        correct, total = self.per_code[code]
        return correct / total

    def to_json_dict(self) -> dict:
        return {
            "space": self.space.label,
            "code_axis": self.code_axis.value,
            "metric": self.metric.value,
            "n_queries": self.n_queries,
            "n_correct": self.n_correct,
            "accuracy": self.accuracy,
            "per_code": {str(code): list(self.per_code[code]) for code in sorted(self.per_code)},
        }


def leave_one_out_code_accuracy(
    embedding_set: EmbeddingSet,
    manifest: GalleryManifest,
    code_axis: CodeAxis = CodeAxis.SHAPE,
    metric: DistanceMetric = DistanceMetric.COSINE,
) -> AccuracyReport:
    """Score every gallery entry's nearest neighbor (self excluded) on one code axis.

    Requires the set to cover the manifest exactly and at least two entries.
    Neighbor ties resolve to the lexicographically smallest image id, matching
    k_nearest.
    """
    coverage = validate_against_manifest(embedding_set, manifest)
    if not coverage.ok:
        raise CoverageError(
            f"embedding set does not cover the manifest: {len(coverage.missing)} missing, "
            f"{len(coverage.extra)} extra (e.g. {(coverage.missing + coverage.extra)[0]!r})"
        )
    n = len(embedding_set)
    if n < 2:
        raise ValidationError("leave-one-out accuracy needs at least 2 entries")
    if metric is DistanceMetric.COSINE and not embedding_set.normalized:
        raise ValidationError("cosine distance requires an L2-normalized embedding set")

    labels = np.array(
        [code_axis.code_of(manifest.lookup(image_id).codes) for image_id in embedding_set.ids]
    )
    rows = embedding_set.matrix.astype(np.float64)
    n_correct = 0
    per_code: dict[int, list[int]] = {}
    for i in range(n):
        distances = pairwise_distances(rows, rows[i], metric)
        distances[i] = np.inf
        # argmin returns the first minimum; rows are id-sorted, so ties resolve
        # to the smallest id exactly as k_nearest does.
        neighbor = int(np.argmin(distances))
        correct = bool(labels[neighbor] == labels[i])
        n_correct += correct
        tally = per_code.setdefault(int(labels[i]), [0, 0])
        tally[0] += correct
        tally[1] += 1
    return AccuracyReport(
        space=embedding_set.space,
        code_axis=code_axis,
        metric=metric,
        n_queries=n,
        n_correct=n_correct,
        per_code={code: (c, t) for code, (c, t) in per_code.items()},
    )


@dataclass(frozen=True, eq=False)
class CentroidModel:
    """Nearest-centroid classifier over one code axis of a known gallery.

    Stand-in for a trained classifier baseline: centroids are exact arithmetic
    means (float64) of the member vectors of each code value.
    """

    code_axis: CodeAxis
    dim: int
    centroids: dict[int, np.ndarray]
    trained_on: GalleryManifest


def train_centroid_model(
    embedding_set: EmbeddingSet,
    manifest: GalleryManifest,
    code_axis: CodeAxis = CodeAxis.SHAPE,
) -> CentroidModel:
    """Compute the mean vector of every code value on the axis.

    Every code value of the manifest's space must have at least one member in
    the set.
    """
    members: dict[int, list[int]] = {}
    for row, image_id in enumerate(embedding_set.ids):
        code = code_axis.code_of(manifest.lookup(image_id).codes)
        members.setdefault(code, []).append(row)
    for code in range(code_axis.count_in(manifest)):
        if code not in members:
            raise ValidationError(f"empty class: no members for {code_axis.value} code {code}")
    matrix64 = embedding_set.matrix.astype(np.float64)
    centroids = {
        code: matrix64[rows].mean(axis=0) for code, rows in sorted(members.items())
    }
    return CentroidModel(
        code_axis=code_axis, dim=embedding_set.dim, centroids=centroids, trained_on=manifest
    )


def centroid_predict(
    model: CentroidModel,
    query: QueryEmbedding,
    metric: DistanceMetric = DistanceMetric.COSINE,
) -> int:
    """Code value whose centroid is closest to the query; ties take the smallest code.

    Centroids of unit vectors are not themselves unit, so the cosine branch uses
    the general angular form 1 - dot(u, v) / (|u| |v|).
    """
    vector = query.vector.astype(np.float64)
    if vector.shape[0] != model.dim:
        raise ValidationError(
            f"query dim {vector.shape[0]} does not match model dim {model.dim}"
        )
    if metric is DistanceMetric.COSINE:
        norm = np.linalg.norm(vector)
        if norm == 0.0:
            raise ValidationError("cosine distance undefined for a zero query vector")
        vector = vector / norm

    best_code = None
    best_distance = np.inf
    for code in sorted(model.centroids):
        centroid = model.centroids[code]
        if metric is DistanceMetric.COSINE:
            cnorm = np.linalg.norm(centroid)
            if cnorm == 0.0:
                raise ValidationError(f"cosine distance undefined for zero centroid {code}")
            distance = float(np.clip(1.0 - np.sum((centroid / cnorm) * vector), 0.0, 2.0))
        else:
            distance = float(np.sum((centroid - vector) ** 2))
        if distance < best_distance:
            best_distance = distance
            best_code = code
    if best_code is None:
        raise ValidationError("centroid model has no centroids")
    return best_code


@dataclass(frozen=True)
class ReportDelta:
    """Accuracy difference between two reports over the same gallery and axis."""

    first: AccuracyReport
    second: AccuracyReport
    accuracy_delta: float
    per_code_delta: dict[int, float]

    def to_json_dict(self, first_name: str = "first", second_name: str = "second") -> dict:
        return {
            "code_axis": self.first.code_axis.value,
            "metric": self.first.metric.value,
            first_name: self.first.to_json_dict(),
            second_name: self.second.to_json_dict(),
            "delta": self.accuracy_delta,
            "per_code_delta": {
                str(code): self.per_code_delta[code] for code in sorted(self.per_code_delta)
            },
        }


def compare_reports(first: AccuracyReport, second: AccuracyReport) -> ReportDelta:
    """Delta of `first` minus `second`, overall and per code value."""
    if first.code_axis is not second.code_axis:
        raise ValidationError(
            f"cannot compare reports over different axes "
            f"({first.code_axis.value} vs {second.code_axis.value})"
        )
    if first.n_queries != second.n_queries:
        raise ValidationError(
            f"cannot compare reports over different gallery sizes "
            f"({first.n_queries} vs {second.n_queries})"
        )
    if set(first.per_code) != set(second.per_code):
        raise ValidationError("cannot compare reports with different code values present")
    per_code_delta = {
        code: first.per_code_accuracy(code) - second.per_code_accuracy(code)
        for code in first.per_code
    }
    return ReportDelta(
        first=first,
        second=second,
        accuracy_delta=first.accuracy - second.accuracy,
        per_code_delta=per_code_delta,
    )
