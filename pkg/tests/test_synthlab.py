import numpy as np
import pytest

from codelens import (
    CodeAxis,
    CodeSpace,
    DistanceMetric,
    GalleryEntry,
    SpaceTag,
    SynthParams,
    ValidationError,
    embed_gallery,
    enumerate_gallery,
    factor_direction,
    generate_synth_gallery,
    l2_normalize,
    leave_one_out_code_accuracy,
    run_bias_experiment,
    run_bias_sweep,
    synth_embed,
    synth_query,
)
from codelens.gallery import CodeTuple


def entry_for(codes: CodeTuple) -> GalleryEntry:
    return GalleryEntry(
        f"g_b{codes.background}_s{codes.shape}_t{codes.texture}_z{codes.noise}", codes
    )


def test_params_validation():
    with pytest.raises(ValidationError, match="dim"):
        SynthParams(dim=1, w_shape=1.0, w_texture=0.0)
    with pytest.raises(ValidationError, match="w_shape"):
        SynthParams(dim=4, w_shape=-1.0, w_texture=0.0)
    with pytest.raises(ValidationError, match="at least one"):
        SynthParams(dim=4, w_shape=0.0, w_texture=0.0, w_noise=0.0, sigma=0.0)


def test_shape_only_weights_collapse_same_shape_entries():
    params = SynthParams(dim=8, w_shape=3.0, w_texture=0.0, w_noise=0.0,
                         sigma=0.0, seed=1)
    a = synth_embed(entry_for(CodeTuple(0, 2, 0, 0)), params)
    b = synth_embed(entry_for(CodeTuple(0, 2, 5, 9)), params)
    c = synth_embed(entry_for(CodeTuple(0, 3, 0, 0)), params)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sigma_only_embeddings_are_distinct_and_deterministic():
    params = SynthParams(dim=8, w_shape=0.0, w_texture=0.0, w_noise=0.0,
                         sigma=1.0, seed=2)
    entries = [entry_for(CodeTuple(0, s, t, z))
               for s in range(2) for t in range(2) for z in range(2)]
    vectors = [synth_embed(e, params) for e in entries]
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            assert not np.array_equal(vectors[i], vectors[j])
    again = [synth_embed(e, params) for e in entries]
    for first, second in zip(vectors, again):
        assert np.array_equal(first, second)


def test_stream_pin_is_stable():
    # regression pin for the documented keyed-stream construction; these values
    # must never change without a format-version bump
    params = SynthParams(dim=8, w_shape=2.0, w_texture=1.0, w_noise=0.5,
                         sigma=0.25, seed=99)
    vector = synth_embed(entry_for(CodeTuple(0, 1, 2, 3)), params)
    expected = np.array([
        1.8116443157196045, 0.10139608383178711, 0.9711362719535828,
        -0.053095292299985886, 0.06621056795120239, -0.35265588760375977,
        -1.6408946514129639, -0.6037626266479492,
    ], dtype=np.float32)
    assert np.array_equal(vector, expected)


def test_factor_directions_are_unit_and_keyed():
    u = factor_direction(5, "shape", 0, 16)
    v = factor_direction(5, "shape", 1, 16)
    w = factor_direction(6, "shape", 0, 16)
    assert abs(np.linalg.norm(u) - 1.0) <= 1e-12
    assert not np.allclose(u, v)
    assert not np.allclose(u, w)
    assert np.array_equal(u, factor_direction(5, "shape", 0, 16))


def test_noise_variant_distance_bound_monte_carlo():
    # two entries differing only in noise index: distance is bounded by the
    # noise-direction span plus a Gaussian tail term
    w_noise, sigma, dim = 0.7, 0.3, 16
    bound = 2.0 * w_noise + 4.0 * sigma * np.sqrt(dim)
    within = 0
    trials = 1000
    for seed in range(trials):
        params = SynthParams(dim=dim, w_shape=1.0, w_texture=1.0,
                             w_noise=w_noise, sigma=sigma, seed=seed)
        a = synth_embed(entry_for(CodeTuple(0, 1, 1, 0)), params)
        b = synth_embed(entry_for(CodeTuple(0, 1, 1, 1)), params)
        distance = float(np.linalg.norm(a.astype(np.float64) - b.astype(np.float64)))
        within += distance <= bound
    assert within / trials >= 0.99


def test_generate_synth_gallery_cardinality(small_space):
    shape_params = SynthParams(dim=8, w_shape=4.0, w_texture=1.0, seed=3)
    texture_params = SynthParams(dim=12, w_shape=1.0, w_texture=4.0, seed=3)
    manifest, shape_set, texture_set = generate_synth_gallery(
        small_space, shape_params, texture_params)
    assert len(manifest) == 120
    assert len(shape_set) == 120 and shape_set.space is SpaceTag.SHAPE
    assert len(texture_set) == 120 and texture_set.space is SpaceTag.TEXTURE
    assert shape_set.dim == 8 and texture_set.dim == 12


def test_generation_is_deterministic(small_space):
    params = SynthParams(dim=8, w_shape=2.0, w_texture=1.0, w_noise=0.5,
                         sigma=0.5, seed=7)
    first = embed_gallery(enumerate_gallery(small_space), params, SpaceTag.SHAPE)
    second = embed_gallery(enumerate_gallery(small_space), params, SpaceTag.SHAPE)
    assert first.ids == second.ids
    assert first.matrix.tobytes() == second.matrix.tobytes()


def test_noiseless_dominant_shape_weight_scores_one():
    space = CodeSpace(n_shape=3, n_texture=4, n_noise=2)
    manifest = enumerate_gallery(space)
    params = SynthParams(dim=8, w_shape=4.0, w_texture=0.0, w_noise=0.0,
                         sigma=0.0, seed=5)
    embeddings = embed_gallery(manifest, params, SpaceTag.SHAPE)
    report = leave_one_out_code_accuracy(embeddings, manifest, CodeAxis.SHAPE,
                                         DistanceMetric.SQUARED_L2)
    assert report.accuracy == 1.0


def test_factor_isolation_on_both_axes():
    space = CodeSpace(n_shape=3, n_texture=4, n_noise=2)
    manifest = enumerate_gallery(space)
    shape_only = SynthParams(dim=8, w_shape=1.0, w_texture=0.0, seed=8)
    texture_only = SynthParams(dim=8, w_shape=0.0, w_texture=1.0, seed=8)
    shape_report = leave_one_out_code_accuracy(
        embed_gallery(manifest, shape_only, SpaceTag.SHAPE), manifest,
        CodeAxis.SHAPE, DistanceMetric.SQUARED_L2)
    texture_report = leave_one_out_code_accuracy(
        embed_gallery(manifest, texture_only, SpaceTag.TEXTURE), manifest,
        CodeAxis.TEXTURE, DistanceMetric.SQUARED_L2)
    assert shape_report.accuracy == 1.0
    assert texture_report.accuracy == 1.0


def test_balanced_weights_score_below_biased_weights():
    space = CodeSpace(n_shape=4, n_texture=5, n_noise=4)
    manifest = enumerate_gallery(space)
    biased = SynthParams(dim=16, w_shape=4.0, w_texture=1.0, w_noise=0.5,
                         sigma=0.5, seed=21)
    balanced = SynthParams(dim=16, w_shape=1.0, w_texture=1.0, w_noise=0.5,
                           sigma=0.5, seed=21)
    biased_acc = leave_one_out_code_accuracy(
        l2_normalize(embed_gallery(manifest, biased, SpaceTag.SHAPE)),
        manifest, CodeAxis.SHAPE, DistanceMetric.COSINE).accuracy
    balanced_acc = leave_one_out_code_accuracy(
        l2_normalize(embed_gallery(manifest, balanced, SpaceTag.SHAPE)),
        manifest, CodeAxis.SHAPE, DistanceMetric.COSINE).accuracy
    assert balanced_acc < biased_acc


def test_bias_experiment_identical_params_has_zero_delta():
    space = CodeSpace(n_shape=3, n_texture=3, n_noise=3)
    params = SynthParams(dim=8, w_shape=2.0, w_texture=1.0, w_noise=0.5,
                         sigma=0.5, seed=4)
    result = run_bias_experiment(space, params, params, DistanceMetric.COSINE)
    assert result.accuracy_delta == 0.0
    assert result.biased.accuracy == result.unbiased.accuracy


def test_bias_experiment_noiseless_biased_is_perfect():
    space = CodeSpace(n_shape=3, n_texture=3, n_noise=2)
    biased = SynthParams(dim=8, w_shape=2.0, w_texture=0.0, w_noise=0.0,
                         sigma=0.0, seed=6)
    unbiased = SynthParams(dim=8, w_shape=1.0, w_texture=1.0, w_noise=0.0,
                           sigma=0.0, seed=6)
    result = run_bias_experiment(space, biased, unbiased, DistanceMetric.SQUARED_L2)
    assert result.biased.accuracy == 1.0


def test_bias_experiment_requires_shared_seed():
    space = CodeSpace(n_shape=2, n_texture=2, n_noise=2)
    a = SynthParams(dim=8, w_shape=2.0, w_texture=1.0, seed=1)
    b = SynthParams(dim=8, w_shape=1.0, w_texture=1.0, seed=2)
    with pytest.raises(ValidationError, match="seed"):
        run_bias_experiment(space, a, b)


def test_sweep_aggregates_runs():
    space = CodeSpace(n_shape=3, n_texture=3, n_noise=3)
    biased = SynthParams(dim=8, w_shape=4.0, w_texture=1.0, w_noise=0.5,
                         sigma=0.5, seed=0)
    unbiased = SynthParams(dim=8, w_shape=1.0, w_texture=1.0, w_noise=0.5,
                           sigma=0.5, seed=0)
    sweep = run_bias_sweep(space, biased, unbiased, seeds=[1, 2, 3])
    assert sweep.seeds == (1, 2, 3)
    assert sweep.mean_delta == sum(r.accuracy_delta for r in sweep.runs) / 3
    doc = sweep.to_json_dict()
    assert doc["seeds"] == [1, 2, 3]
    assert len(doc["runs"]) == 3
    assert "delta" in doc["runs"][0]


def test_monotonicity_in_shape_weight():
    space = CodeSpace(n_shape=4, n_texture=4, n_noise=3)
    seeds = range(1, 6)
    means = []
    for w_shape in (0.5, 1.0, 2.0, 4.0):
        accs = []
        for seed in seeds:
            params = SynthParams(dim=16, w_shape=w_shape, w_texture=1.0,
                                 w_noise=0.5, sigma=0.5, seed=seed)
            manifest = enumerate_gallery(space)
            embeddings = l2_normalize(embed_gallery(manifest, params, SpaceTag.SHAPE))
            accs.append(leave_one_out_code_accuracy(
                embeddings, manifest, CodeAxis.SHAPE, DistanceMetric.COSINE).accuracy)
        means.append(sum(accs) / len(accs))
    for lower, higher in zip(means, means[1:]):
        assert higher >= lower - 0.02


def test_synth_query_is_distinct_from_gallery_embedding():
    space = CodeSpace(n_shape=2, n_texture=2, n_noise=2)
    manifest = enumerate_gallery(space)
    params = SynthParams(dim=8, w_shape=2.0, w_texture=1.0, w_noise=0.2,
                         sigma=0.4, seed=12)
    embeddings = embed_gallery(manifest, params, SpaceTag.SHAPE)
    codes = manifest.entries[0].codes
    probe = synth_query(codes, params, SpaceTag.SHAPE, label="I2")
    assert probe.source_label == "q_I2"
    assert not np.array_equal(probe.vector,
                              embeddings.vector(manifest.entries[0].image_id))
