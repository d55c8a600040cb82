"""Synthetic embeddings with controllable shape/texture/noise factor weights.

Each embedding is an additive linear factor model: per-index unit direction
vectors for the shape, texture, and noise axes, weighted and summed, plus
per-entry Gaussian observation noise. This is a simulation of how strongly an
embedder encodes each generative factor, not a claim about CNN geometry.

All randomness is drawn from Philox4x64 counter-based generators keyed by
SHA-256 of (namespace, seed, axis, index) or (namespace, seed, image_id), so
every output is a pure, platform-portable function of its inputs at float32
precision, independent of generation order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from .embedding import EmbeddingSet, QueryEmbedding, SpaceTag, l2_normalize
from .errors import ValidationError
from .evaluation import (
    AccuracyReport,
    CodeAxis,
    ReportDelta,
    compare_reports,
    leave_one_out_code_accuracy,
)
from .gallery import CodeSpace, CodeTuple, GalleryEntry, GalleryManifest, enumerate_gallery
from .retrieval import DistanceMetric

_STREAM_NAMESPACE = "codelens.synthlab.v1"


def _stream(*parts) -> np.random.Generator:
    """Philox generator keyed by a SHA-256 digest of the stream identity."""
    text = "|".join(str(part) for part in parts)
    digest = hashlib.sha256(f"{_STREAM_NAMESPACE}|{text}".encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SynthParams:
    """Factor weights and noise level for one synthetic embedder."""

    dim: int
    w_shape: float
    w_texture: float
    w_noise: float = 0.0
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.dim, int) or isinstance(self.dim, bool) or self.dim < 2:
            raise ValidationError(f"dim must be an integer >= 2, got {self.dim!r}")
        for name in ("w_shape", "w_texture", "w_noise", "sigma"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"{name} must be a finite nonnegative real, got {value!r}")
        if self.w_shape == 0 and self.w_texture == 0 and self.w_noise == 0 and self.sigma == 0:
            raise ValidationError(
                "at least one of w_shape, w_texture, w_noise, sigma must be positive"
            )
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ValidationError(f"seed must be an integer, got {self.seed!r}")


def factor_direction(seed: int, axis: str, index: int, dim: int) -> np.ndarray:
    """Unit-norm float64 direction for one code value, keyed by (seed, axis, index)."""
    sample = _stream("dir", seed, axis, index).standard_normal(dim)
    return sample / np.linalg.norm(sample)


def synth_embed(entry: GalleryEntry, params: SynthParams) -> np.ndarray:
    """Deterministic float32 embedding of one gallery entry.

    vector = w_shape * U[shape] + w_texture * V[texture] + w_noise * Z[noise]
             + sigma * eps(image_id), with U, V, Z unit directions per code
    value and eps standard Gaussian per entry.
    """
    codes = entry.codes
    vector = params.w_shape * factor_direction(params.seed, "shape", codes.shape, params.dim)
    vector = vector + params.w_texture * factor_direction(
        params.seed, "texture", codes.texture, params.dim
    )
    if params.w_noise:
        vector = vector + params.w_noise * factor_direction(
            params.seed, "noise", codes.noise, params.dim
        )
    if params.sigma:
        eps = _stream("eps", params.seed, entry.image_id).standard_normal(params.dim)
        vector = vector + params.sigma * eps
    return vector.astype(np.float32)


def embed_gallery(
    manifest: GalleryManifest, params: SynthParams, space: SpaceTag
) -> EmbeddingSet:
    """Embed every manifest entry with one synthetic embedder."""
    vectors = {entry.image_id: synth_embed(entry, params) for entry in manifest.entries}
    return EmbeddingSet.from_vectors(space, vectors, dim=params.dim)


def generate_synth_gallery(
    space: CodeSpace, shape_params: SynthParams, texture_params: SynthParams
) -> tuple[GalleryManifest, EmbeddingSet, EmbeddingSet]:
    """Enumerate a gallery and embed it with both synthetic embedders.

    Returns (manifest, shape-space set from shape_params, texture-space set
    from texture_params). The two embedders may use different dims.
    """
    manifest = enumerate_gallery(space)
    shape_set = embed_gallery(manifest, shape_params, SpaceTag.SHAPE)
    texture_set = embed_gallery(manifest, texture_params, SpaceTag.TEXTURE)
    return manifest, shape_set, texture_set


def synth_query(
    codes: CodeTuple, params: SynthParams, space: SpaceTag, label: str = "I1"
) -> QueryEmbedding:
    """A query drawn from the cluster of `codes`, with fresh observation noise.

    The per-entry noise stream is keyed by the query id ("q_" + label), so the
    query never coincides with a gallery embedding when sigma is positive.
    """
    pseudo = GalleryEntry(image_id=f"q_{label}", codes=codes)
    return QueryEmbedding(source_label=f"q_{label}", space=space, vector=synth_embed(pseudo, params))


@dataclass(frozen=True)
class BiasExperiment:
    """Paired shape-accuracy reports for a biased and an unbiased embedder."""

    biased: AccuracyReport
    unbiased: AccuracyReport
    delta: ReportDelta
    seed: int

    @property
    def accuracy_delta(self) -> float:
        return self.delta.accuracy_delta

    def to_json_dict(self) -> dict:
        doc = self.delta.to_json_dict(first_name="biased", second_name="unbiased")
        doc["seed"] = self.seed
        return doc


def run_bias_experiment(
    space: CodeSpace,
    biased: SynthParams,
    unbiased: SynthParams,
    metric: DistanceMetric = DistanceMetric.COSINE,
) -> BiasExperiment:
    """Leave-one-out shape accuracy of a biased vs an unbiased embedder.

    The biased embedder plays the shape-biased network (tagged shape space),
    the unbiased one the standard network (tagged texture space); both are
    scored on the shape axis over the same gallery. Sets are L2-normalized
    first when the metric is cosine. Deterministic given the params' seeds.
    """
    if biased.seed != unbiased.seed:
        raise ValidationError(
            f"biased and unbiased params must share a seed for a paired comparison, "
            f"got {biased.seed} vs {unbiased.seed}"
        )
    manifest = enumerate_gallery(space)
    biased_set = embed_gallery(manifest, biased, SpaceTag.SHAPE)
    unbiased_set = embed_gallery(manifest, unbiased, SpaceTag.TEXTURE)
    if metric is DistanceMetric.COSINE:
        biased_set = l2_normalize(biased_set)
        unbiased_set = l2_normalize(unbiased_set)
    biased_report = leave_one_out_code_accuracy(biased_set, manifest, CodeAxis.SHAPE, metric)
    unbiased_report = leave_one_out_code_accuracy(unbiased_set, manifest, CodeAxis.SHAPE, metric)
    return BiasExperiment(
        biased=biased_report,
        unbiased=unbiased_report,
        delta=compare_reports(biased_report, unbiased_report),
        seed=biased.seed,
    )


@dataclass(frozen=True)
class BiasSweep:
    """One bias experiment per seed, with cross-seed means."""

    runs: tuple[BiasExperiment, ...]

    @property
    def seeds(self) -> tuple[int, ...]:
        return tuple(run.seed for run in self.runs)

    @property
    def mean_delta(self) -> float:
        return sum(run.accuracy_delta for run in self.runs) / len(self.runs)

    @property
    def mean_biased_accuracy(self) -> float:
        return sum(run.biased.accuracy for run in self.runs) / len(self.runs)

    @property
    def mean_unbiased_accuracy(self) -> float:
        return sum(run.unbiased.accuracy for run in self.runs) / len(self.runs)

    def to_json_dict(self) -> dict:
        return {
            "seeds": list(self.seeds),
            "mean_biased_accuracy": self.mean_biased_accuracy,
            "mean_unbiased_accuracy": self.mean_unbiased_accuracy,
            "mean_delta": self.mean_delta,
            "runs": [run.to_json_dict() for run in self.runs],
        }


def run_bias_sweep(
    space: CodeSpace,
    biased: SynthParams,
    unbiased: SynthParams,
    seeds: tuple[int, ...] | list[int],
    metric: DistanceMetric = DistanceMetric.COSINE,
) -> BiasSweep:
    """Run the bias experiment once per seed (the params' own seeds are replaced)."""
    if not seeds:
        raise ValidationError("at least one seed is required")
    runs = tuple(
        run_bias_experiment(
            space, replace(biased, seed=seed), replace(unbiased, seed=seed), metric
        )
        for seed in seeds
    )
    return BiasSweep(runs=runs)
