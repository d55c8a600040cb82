"""codelens: generator-code inference by nearest-neighbor retrieval in dual
embedding spaces, with exact evaluation and a synthetic embedding lab."""

from .errors import (
    AdapterError,
    CodeLensError,
    CoverageError,
    FormatError,
    NotFoundError,
    SpaceMismatchError,
    TruncatedError,
    ValidationError,
    VersionError,
)
from .gallery import (
    BackgroundPolicy,
    CodeSpace,
    CodeTuple,
    DEFAULT_NOISE_COUNT,
    GalleryEntry,
    GalleryManifest,
    enumerate_gallery,
    image_id_for,
    load_manifest,
    save_manifest,
)
from .embedding import (
    CoverageReport,
    EmbeddingSet,
    QueryEmbedding,
    SpaceTag,
    ingest_embedding_file,
    l2_normalize,
    read_space_tag,
    validate_against_manifest,
    write_embedding_file,
)
from .retrieval import (
    CodeSelection,
    ComposedInput,
    DistanceMetric,
    GalleryHit,
    NoiseSource,
    compose_input,
    k_nearest,
    pairwise_distances,
    predict_shape_code,
    predict_texture_code,
)
from .evaluation import (
    AccuracyReport,
    CentroidModel,
    CodeAxis,
    ReportDelta,
    centroid_predict,
    compare_reports,
    leave_one_out_code_accuracy,
    train_centroid_model,
)
from .synthlab import (
    BiasExperiment,
    BiasSweep,
    SynthParams,
    embed_gallery,
    factor_direction,
    generate_synth_gallery,
    run_bias_experiment,
    run_bias_sweep,
    synth_embed,
    synth_query,
)

__version__ = "0.1.0"
