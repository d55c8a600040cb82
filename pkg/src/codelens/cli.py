"""Command-line orchestration: gallery enumeration, the two-image pipeline,
accuracy evaluation with rendered reports, and the synthetic embedding lab.

Exit codes: 0 success, 2 validation or configuration error, 3 external adapter
failure. Diagnostics go to stderr; with --json, stdout carries only the result
document. The CODELENS_LOG environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shlex
import subprocess
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .embedding import (
    CFGE_MAGIC,
    EmbeddingSet,
    QueryEmbedding,
    SpaceTag,
    ingest_embedding_file,
    l2_normalize,
    read_space_tag,
    write_embedding_file,
)
from .errors import AdapterError, CodeLensError, FormatError, ValidationError
from .evaluation import CodeAxis, compare_reports, leave_one_out_code_accuracy
from .gallery import (
    BackgroundPolicy,
    CodeSpace,
    CodeTuple,
    DEFAULT_NOISE_COUNT,
    enumerate_gallery,
    load_manifest,
    save_manifest,
)
from .retrieval import (
    CodeSelection,
    DistanceMetric,
    GalleryHit,
    NoiseSource,
    compose_input,
    predict_shape_code,
    predict_texture_code,
)
from .synthlab import SynthParams, generate_synth_gallery, run_bias_sweep, synth_query

logger = logging.getLogger("codelens")

_METRICS = {metric.value: metric for metric in DistanceMetric}
_AXES = {axis.value: axis for axis in CodeAxis}
_POLICIES = {policy.value: policy for policy in BackgroundPolicy}
_NOISE_SOURCES = {source.value: source for source in NoiseSource}


def _configure_logging() -> None:
    level_name = os.environ.get("CODELENS_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _write_json(doc: dict, destination: Path) -> None:
    destination.write_bytes((json.dumps(doc, indent=2) + "\n").encode("utf-8"))


def _emit(doc: dict, as_json: bool, human_lines: list[str]) -> None:
    if as_json:
        print(json.dumps(doc, indent=2))
    else:
        for line in human_lines:
            print(line)


def _space_from_args(args) -> CodeSpace:
    return CodeSpace(
        n_shape=args.shapes,
        n_texture=args.textures,
        n_noise=args.noise,
        n_background=args.backgrounds,
        background_policy=_POLICIES[args.policy],
        fixed_background=args.fixed_background,
    )


def _add_space_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--shapes", type=int, required=True, help="number of shape codes")
    parser.add_argument("--textures", type=int, required=True, help="number of texture codes")
    parser.add_argument("--noise", type=int, default=DEFAULT_NOISE_COUNT,
                        help="noise variants per code pair (default %(default)s)")
    parser.add_argument("--backgrounds", type=int, default=1,
                        help="number of background codes (default %(default)s)")
    parser.add_argument("--policy", choices=sorted(_POLICIES), default="tied",
                        help="background policy (default %(default)s)")
    parser.add_argument("--fixed-background", type=int, default=None,
                        help="background index for the fixed policy")


def _hit_json(hit: GalleryHit) -> dict:
    return {
        "image_id": hit.image_id,
        "background": hit.codes.background,
        "shape": hit.codes.shape,
        "texture": hit.codes.texture,
        "noise": hit.codes.noise,
        "distance": hit.distance,
        "rank": hit.rank,
    }


# ---------------------------------------------------------------------------
# gallery enumerate
# ---------------------------------------------------------------------------

def cmd_gallery_enumerate(args) -> int:
    manifest = enumerate_gallery(_space_from_args(args))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_manifest(manifest, out)
    _emit(
        {"path": str(out), "entries": len(manifest)},
        args.json,
        [f"wrote {len(manifest)} entries to {out}"],
    )
    return 0


# ---------------------------------------------------------------------------
# cfge info
# ---------------------------------------------------------------------------

def cmd_cfge_info(args) -> int:
    path = Path(args.file)
    space = read_space_tag(path)
    if args.expect_space is not None:
        space = SpaceTag[args.expect_space.upper()]
    embedding_set = ingest_embedding_file(path, expected_space=space)
    doc = {
        "path": str(path),
        "space": embedding_set.space.label,
        "dim": embedding_set.dim,
        "count": len(embedding_set),
        "normalized": embedding_set.normalized,
    }
    _emit(doc, args.json, [
        f"{path}: {embedding_set.space.label} space, dim {embedding_set.dim}, "
        f"{len(embedding_set)} records, normalized={embedding_set.normalized}",
    ])
    return 0


# ---------------------------------------------------------------------------
# eval accuracy
# ---------------------------------------------------------------------------

def _load_set_for_eval(path: Path, metric: DistanceMetric) -> EmbeddingSet:
    embedding_set = ingest_embedding_file(path, expected_space=read_space_tag(path))
    if metric is DistanceMetric.COSINE and not embedding_set.normalized:
        embedding_set = l2_normalize(embedding_set)
    return embedding_set


def cmd_eval_accuracy(args) -> int:
    from . import report as report_mod

    metric = _METRICS[args.metric]
    axis = _AXES[args.axis]
    manifest = load_manifest(args.manifest)
    primary = _load_set_for_eval(Path(args.embeddings), metric)
    primary_report = leave_one_out_code_accuracy(primary, manifest, axis, metric)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{args.name}.json"
    csv_path = out_dir / f"{args.name}.csv"
    fig_path = out_dir / f"{args.name}.png"

    lines = [
        f"{axis.value}-code accuracy ({primary.space.label} space, {metric.value}): "
        f"{primary_report.accuracy:.4f} ({primary_report.n_correct}/{primary_report.n_queries})",
    ]
    if args.compare is not None:
        other = _load_set_for_eval(Path(args.compare), metric)
        other_report = leave_one_out_code_accuracy(other, manifest, axis, metric)
        delta = compare_reports(primary_report, other_report)
        doc = delta.to_json_dict(first_name="primary", second_name="compare")
        report_mod.write_delta_csv(delta, csv_path)
        if not args.no_figure:
            report_mod.render_delta_figure(delta, fig_path)
        lines.append(
            f"compare accuracy ({other.space.label} space): {other_report.accuracy:.4f}; "
            f"delta {delta.accuracy_delta:+.4f}"
        )
    else:
        doc = primary_report.to_json_dict()
        report_mod.write_report_csv(primary_report, csv_path)
        if not args.no_figure:
            report_mod.render_report_figure(primary_report, fig_path)
    _write_json(doc, json_path)
    lines.append(f"report written to {json_path}")
    _emit(doc, args.json, lines)
    return 0


# ---------------------------------------------------------------------------
# pipeline run
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    """Validated pipeline configuration with paths resolved against the config file."""

    manifest: Path
    texture_embeddings: Path
    shape_embeddings: Path
    metric: DistanceMetric
    noise_source: NoiseSource
    fixed_noise: int | None
    background_policy: BackgroundPolicy | None
    fixed_background: int | None
    texture_embedder_command: str | None
    shape_embedder_command: str | None
    generator_command: str | None
    output_dir: Path

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        config_path = Path(path)
        try:
            doc = json.loads(config_path.read_bytes().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"malformed config JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise FormatError("config root must be an object")
        known = {
            "manifest", "texture_embeddings", "shape_embeddings", "metric",
            "noise_source", "fixed_noise", "background_policy", "fixed_background",
            "texture_embedder_command", "shape_embedder_command", "generator_command",
            "output_dir",
        }
        for key in doc:
            if key not in known:
                logger.warning("ignoring unknown config key %r", key)
        base = config_path.parent

        def path_of(key: str, required: bool = True, default: str | None = None) -> Path | None:
            value = doc.get(key, default)
            if value is None:
                if required:
                    raise ValidationError(f"config is missing required key {key!r}")
                return None
            if not isinstance(value, str):
                raise ValidationError(f"config key {key!r} must be a string path")
            return (base / value).resolve() if not Path(value).is_absolute() else Path(value)

        metric_name = doc.get("metric", DistanceMetric.COSINE.value)
        if metric_name not in _METRICS:
            raise ValidationError(f"unknown metric {metric_name!r} (choose from {sorted(_METRICS)})")
        source_name = doc.get("noise_source", NoiseSource.SHAPE_HIT.value)
        if source_name not in _NOISE_SOURCES:
            raise ValidationError(
                f"unknown noise_source {source_name!r} (choose from {sorted(_NOISE_SOURCES)})"
            )
        policy_name = doc.get("background_policy")
        if policy_name is not None and policy_name not in _POLICIES:
            raise ValidationError(
                f"unknown background_policy {policy_name!r} (choose from {sorted(_POLICIES)})"
            )

        def command_of(key: str) -> str | None:
            value = doc.get(key)
            if value is not None and not isinstance(value, str):
                raise ValidationError(f"config key {key!r} must be a command string")
            return value

        return cls(
            manifest=path_of("manifest"),
            texture_embeddings=path_of("texture_embeddings"),
            shape_embeddings=path_of("shape_embeddings"),
            metric=_METRICS[metric_name],
            noise_source=_NOISE_SOURCES[source_name],
            fixed_noise=doc.get("fixed_noise"),
            background_policy=_POLICIES[policy_name] if policy_name else None,
            fixed_background=doc.get("fixed_background"),
            texture_embedder_command=command_of("texture_embedder_command"),
            shape_embedder_command=command_of("shape_embedder_command"),
            generator_command=command_of("generator_command"),
            output_dir=path_of("output_dir", required=False, default="."),
        )


def _run_adapter(command: list[str], what: str) -> None:
    logger.info("running %s adapter: %s", what, " ".join(command))
    try:
        result = subprocess.run(command, capture_output=True, text=True)
    except OSError as exc:
        raise AdapterError(f"{what} adapter could not be launched: {exc}") from exc
    if result.returncode != 0:
        raise AdapterError(
            f"{what} adapter exited with status {result.returncode}",
            returncode=result.returncode,
            stderr=result.stderr,
        )


def _substitute(template: str, mapping: dict[str, str]) -> list[str]:
    tokens = shlex.split(template)
    out = []
    for token in tokens:
        for placeholder, value in mapping.items():
            token = token.replace(placeholder, value)
        out.append(token)
    return out


def _is_cfge(path: Path) -> bool:
    try:
        with open(path, "rb") as handle:
            return handle.read(len(CFGE_MAGIC)) == CFGE_MAGIC
    except OSError as exc:
        raise ValidationError(f"cannot read query input {path}: {exc}") from exc


def _load_query(
    source: Path,
    space: SpaceTag,
    config: PipelineConfig,
    role: str,
    preferred_id: str | None,
) -> QueryEmbedding:
    """Load a query from a CFGE file, or embed a raw image via the configured adapter."""
    if _is_cfge(source):
        cfge_path = source
    else:
        command = (
            config.texture_embedder_command
            if space is SpaceTag.TEXTURE
            else config.shape_embedder_command
        )
        if command is None:
            raise ValidationError(
                f"{role} is not a CFGE file and no {space.label} embedder_command is configured"
            )
        cfge_path = config.output_dir / f"q_{role}.cfge"
        argv = _substitute(command, {"{input}": str(source), "{output}": str(cfge_path)})
        _run_adapter(argv, f"{space.label} embedder")
        if not cfge_path.exists():
            raise AdapterError(f"{space.label} embedder did not produce {cfge_path}")

    embedded = ingest_embedding_file(cfge_path, expected_space=space)
    if preferred_id is not None:
        if preferred_id not in embedded:
            raise ValidationError(f"id {preferred_id!r} not present in {cfge_path}")
        image_id = preferred_id
    elif len(embedded) == 1:
        image_id = embedded.ids[0]
    else:
        raise ValidationError(
            f"{cfge_path} holds {len(embedded)} records; select one with --{role}-id"
        )
    vector = embedded.vector(image_id)
    if config.metric is DistanceMetric.COSINE:
        norm = float(np.linalg.norm(vector.astype(np.float64)))
        if norm == 0.0:
            raise ValidationError(f"query {image_id!r} is a zero vector")
        vector = (vector.astype(np.float64) / norm).astype(np.float32)
    return QueryEmbedding(source_label=image_id, space=space, vector=vector)


def cmd_pipeline_run(args) -> int:
    config = PipelineConfig.load(args.config)
    config.output_dir.mkdir(parents=True, exist_ok=True)

    manifest = load_manifest(config.manifest)
    texture_set = _load_set_for_eval(config.texture_embeddings, config.metric)
    shape_set = _load_set_for_eval(config.shape_embeddings, config.metric)
    if texture_set.space is not SpaceTag.TEXTURE:
        raise ValidationError(f"{config.texture_embeddings} is not tagged as the texture space")
    if shape_set.space is not SpaceTag.SHAPE:
        raise ValidationError(f"{config.shape_embeddings} is not tagged as the shape space")

    i1 = _load_query(Path(args.i1), SpaceTag.TEXTURE, config, "i1", args.i1_id)
    i2 = _load_query(Path(args.i2), SpaceTag.SHAPE, config, "i2", args.i2_id)

    texture_hit = predict_texture_code(i1, texture_set, manifest, config.metric)
    shape_hit = predict_shape_code(i2, shape_set, manifest, config.metric)
    selection = CodeSelection.from_hits(texture_hit, shape_hit)

    space = manifest.code_space
    if config.background_policy is not None:
        space = replace(
            space,
            background_policy=config.background_policy,
            fixed_background=config.fixed_background,
        )
    composed = compose_input(selection, space, config.noise_source, config.fixed_noise)
    codes = composed.codes

    generated_path: Path | None = None
    if config.generator_command is not None:
        generated_path = config.output_dir / "generated.png"
        argv = _substitute(config.generator_command, {"{output}": str(generated_path)})
        argv += [
            "--background", str(codes.background),
            "--shape", str(codes.shape),
            "--texture", str(codes.texture),
            "--noise", str(codes.noise),
            "--out", str(generated_path),
        ]
        _run_adapter(argv, "generator")

    doc = {
        "i1": i1.source_label,
        "i2": i2.source_label,
        "texture_code": selection.texture_code,
        "shape_code": selection.shape_code,
        "composed": {
            "background": codes.background,
            "shape": codes.shape,
            "texture": codes.texture,
            "noise": codes.noise,
        },
        "texture_hit": _hit_json(texture_hit),
        "shape_hit": _hit_json(shape_hit),
    }
    if generated_path is not None:
        doc["generated_image"] = str(generated_path)

    result_path = config.output_dir / "pipeline_result.json"
    _write_json(doc, result_path)
    lines = [
        f"texture code T={selection.texture_code} from {texture_hit.image_id} "
        f"(distance {texture_hit.distance:.6g})",
        f"shape code S={selection.shape_code} from {shape_hit.image_id} "
        f"(distance {shape_hit.distance:.6g})",
        f"composed input: background={codes.background} shape={codes.shape} "
        f"texture={codes.texture} noise={codes.noise}",
        f"result written to {result_path}",
    ]
    if generated_path is not None:
        lines.append(f"generated image at {generated_path}")
    _emit(doc, args.json, lines)
    return 0


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise ValidationError(f"--seeds must be a comma-separated integer list, got {text!r}")
    if not seeds:
        raise ValidationError("--seeds must name at least one seed")
    return seeds


def _parse_query_codes(text: str) -> tuple[int, int, int, int]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValidationError("--query takes four comma-separated indices: B,S,T,Z")
    try:
        b, s, t, z = (int(part) for part in parts)
    except ValueError:
        raise ValidationError(f"--query indices must be integers, got {text!r}")
    return b, s, t, z


def cmd_synth(args) -> int:
    from . import report as report_mod

    space = _space_from_args(args)
    shape_params = SynthParams(
        dim=args.dim, w_shape=args.bias, w_texture=args.base,
        w_noise=args.w_noise, sigma=args.sigma, seed=args.seed,
    )
    texture_params = SynthParams(
        dim=args.dim, w_shape=args.base, w_texture=args.bias,
        w_noise=args.w_noise, sigma=args.sigma, seed=args.seed,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest, shape_set, texture_set = generate_synth_gallery(space, shape_params, texture_params)
    manifest_path = out_dir / "manifest.json"
    shape_path = out_dir / "shape.cfge"
    texture_path = out_dir / "texture.cfge"
    save_manifest(manifest, manifest_path)
    write_embedding_file(shape_set, shape_path)
    write_embedding_file(texture_set, texture_path)

    doc: dict = {
        "manifest": str(manifest_path),
        "shape_embeddings": str(shape_path),
        "texture_embeddings": str(texture_path),
        "entries": len(manifest),
    }
    lines = [
        f"wrote {len(manifest)}-entry gallery to {manifest_path}",
        f"wrote embeddings to {shape_path} and {texture_path}",
    ]

    if args.query is not None:
        b, s, t, z = _parse_query_codes(args.query)
        codes = CodeTuple(background=b, shape=s, texture=t, noise=z)
        codes.validate(space)
        q1 = synth_query(codes, texture_params, SpaceTag.TEXTURE, label="I1")
        q2 = synth_query(codes, shape_params, SpaceTag.SHAPE, label="I2")
        q1_path = out_dir / "query_texture.cfge"
        q2_path = out_dir / "query_shape.cfge"
        write_embedding_file(
            EmbeddingSet.from_vectors(SpaceTag.TEXTURE, {q1.source_label: q1.vector}), q1_path
        )
        write_embedding_file(
            EmbeddingSet.from_vectors(SpaceTag.SHAPE, {q2.source_label: q2.vector}), q2_path
        )
        doc["query_texture"] = str(q1_path)
        doc["query_shape"] = str(q2_path)
        lines.append(f"wrote query embeddings to {q1_path} and {q2_path}")

    if args.experiment:
        metric = _METRICS[args.metric]
        seeds = _parse_seeds(args.seeds)
        biased = SynthParams(dim=args.dim, w_shape=args.bias, w_texture=args.base,
                             w_noise=args.w_noise, sigma=args.sigma, seed=seeds[0])
        unbiased = SynthParams(dim=args.dim, w_shape=args.base, w_texture=args.base,
                               w_noise=args.w_noise, sigma=args.sigma, seed=seeds[0])
        sweep = run_bias_sweep(space, biased, unbiased, seeds, metric)
        experiment_doc = sweep.to_json_dict()
        experiment_path = out_dir / "experiment.json"
        _write_json(experiment_doc, experiment_path)
        report_mod.write_sweep_csv(sweep, out_dir / "experiment.csv")
        if not args.no_figure:
            report_mod.render_sweep_figure(sweep, out_dir / "experiment.png")
        doc["experiment"] = experiment_doc
        lines.append(
            f"bias experiment over seeds {list(seeds)}: mean delta "
            f"{sweep.mean_delta:+.4f} (biased {sweep.mean_biased_accuracy:.4f}, "
            f"unbiased {sweep.mean_unbiased_accuracy:.4f}); report at {experiment_path}"
        )

    _emit(doc, args.json, lines)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codelens",
        description="Generator-code inference by nearest-neighbor retrieval "
                    "in dual embedding spaces.",
    )
    top = parser.add_subparsers(dest="command", required=True)

    gallery = top.add_parser("gallery", help="gallery manifest operations")
    gallery_sub = gallery.add_subparsers(dest="subcommand", required=True)
    enumerate_p = gallery_sub.add_parser("enumerate", help="enumerate all code combinations")
    _add_space_arguments(enumerate_p)
    enumerate_p.add_argument("--out", required=True, help="manifest JSON destination")
    enumerate_p.add_argument("--json", action="store_true", help="print the result as JSON")
    enumerate_p.set_defaults(func=cmd_gallery_enumerate)

    cfge = top.add_parser("cfge", help="embedding file utilities")
    cfge_sub = cfge.add_subparsers(dest="subcommand", required=True)
    info_p = cfge_sub.add_parser("info", help="validate a CFGE file and print its header")
    info_p.add_argument("file", help="CFGE file to inspect")
    info_p.add_argument("--expect-space", choices=["texture", "shape"], default=None,
                        help="fail unless the file is tagged with this space")
    info_p.add_argument("--json", action="store_true", help="print the result as JSON")
    info_p.set_defaults(func=cmd_cfge_info)

    eval_p = top.add_parser("eval", help="evaluation reports")
    eval_sub = eval_p.add_subparsers(dest="subcommand", required=True)
    accuracy_p = eval_sub.add_parser(
        "accuracy", help="leave-one-out code accuracy over a gallery's own embeddings"
    )
    accuracy_p.add_argument("--manifest", required=True, help="gallery manifest JSON")
    accuracy_p.add_argument("--embeddings", required=True, help="CFGE embeddings of the gallery")
    accuracy_p.add_argument("--axis", choices=sorted(_AXES), default="shape",
                            help="code axis to score (default %(default)s)")
    accuracy_p.add_argument("--metric", choices=sorted(_METRICS), default="cosine",
                            help="distance metric (default %(default)s)")
    accuracy_p.add_argument("--compare", default=None,
                            help="second CFGE file; emits paired reports with a delta")
    accuracy_p.add_argument("--out-dir", default=".", help="report directory (default %(default)s)")
    accuracy_p.add_argument("--name", default="accuracy",
                            help="basename for report files (default %(default)s)")
    accuracy_p.add_argument("--no-figure", action="store_true", help="skip the PNG figure")
    accuracy_p.add_argument("--json", action="store_true", help="print the report JSON to stdout")
    accuracy_p.set_defaults(func=cmd_eval_accuracy)

    pipeline = top.add_parser("pipeline", help="two-image code-inference pipeline")
    pipeline_sub = pipeline.add_subparsers(dest="subcommand", required=True)
    run_p = pipeline_sub.add_parser("run", help="predict codes for an image pair and compose input")
    run_p.add_argument("--config", required=True, help="pipeline config JSON")
    run_p.add_argument("--i1", required=True,
                       help="first input (texture source): CFGE file or raw image")
    run_p.add_argument("--i2", required=True,
                       help="second input (shape source): CFGE file or raw image")
    run_p.add_argument("--i1-id", default=None, help="record id when --i1 holds several records")
    run_p.add_argument("--i2-id", default=None, help="record id when --i2 holds several records")
    run_p.add_argument("--json", action="store_true", help="print the result JSON to stdout")
    run_p.set_defaults(func=cmd_pipeline_run)

    synth_p = top.add_parser("synth", help="synthetic gallery, embeddings, and bias experiment")
    _add_space_arguments(synth_p)
    synth_p.add_argument("--dim", type=int, default=32, help="embedding dim (default %(default)s)")
    synth_p.add_argument("--seed", type=int, default=42, help="stream seed (default %(default)s)")
    synth_p.add_argument("--bias", type=float, default=4.0,
                         help="dominant factor weight (default %(default)s)")
    synth_p.add_argument("--base", type=float, default=1.0,
                         help="off-factor weight (default %(default)s)")
    synth_p.add_argument("--w-noise", type=float, default=0.5,
                         help="noise-direction weight (default %(default)s)")
    synth_p.add_argument("--sigma", type=float, default=0.5,
                         help="per-component observation noise (default %(default)s)")
    synth_p.add_argument("--out-dir", required=True, help="output directory")
    synth_p.add_argument("--query", default=None, metavar="B,S,T,Z",
                         help="also write query embeddings drawn from these codes")
    synth_p.add_argument("--experiment", action="store_true",
                         help="run the biased-vs-unbiased accuracy experiment")
    synth_p.add_argument("--seeds", default="1,2,3,4,5",
                         help="experiment seeds, comma separated (default %(default)s)")
    synth_p.add_argument("--metric", choices=sorted(_METRICS), default="cosine",
                         help="experiment metric (default %(default)s)")
    synth_p.add_argument("--no-figure", action="store_true", help="skip the PNG figure")
    synth_p.add_argument("--json", action="store_true", help="print the result JSON to stdout")
    synth_p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.stderr:
            sys.stderr.write(exc.stderr)
        return 3
    except CodeLensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
