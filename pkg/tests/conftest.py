import numpy as np
import pytest

from codelens import (
    CodeSpace,
    EmbeddingSet,
    SpaceTag,
    enumerate_gallery,
)


@pytest.fixture
def small_space():
    return CodeSpace(n_shape=3, n_texture=4, n_noise=10)


@pytest.fixture
def small_manifest(small_space):
    return enumerate_gallery(small_space)


def flat_manifest(n: int):
    """A manifest with exactly n entries: n shape codes, one of everything else."""
    return enumerate_gallery(CodeSpace(n_shape=n, n_texture=1, n_noise=1))


def set_from_rows(space: SpaceTag, ids, rows) -> EmbeddingSet:
    return EmbeddingSet.from_vectors(space, dict(zip(ids, np.asarray(rows, dtype=np.float32))))


def random_unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    rows = rng.standard_normal((n, dim))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return rows.astype(np.float32)
