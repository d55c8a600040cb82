"""CLI for the embedder adapter.

Usage: embedder-adapter extract --variant standard|shape_biased --images DIR
       --out FILE.cfge [--ids-prefix q_] [--weights imagenet|random|PATH]
       [--seed N] [--batch-size N] [--strict]
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .extract import VARIANTS, ExtractError, extract_embeddings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embedder-adapter",
        description="Export CNN global-average-pooling features as CFGE embedding files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    extract_p = sub.add_parser("extract", help="embed every image in a folder")
    extract_p.add_argument("--variant", choices=VARIANTS, required=True,
                           help="standard (texture space) or shape_biased (shape space)")
    extract_p.add_argument("--images", required=True,
                           help="folder of input images (or a single image file)")
    extract_p.add_argument("--out", required=True, help="CFGE destination path")
    extract_p.add_argument("--ids-prefix", default="",
                           help="prefix for record ids (e.g. q_ for queries)")
    extract_p.add_argument("--weights", default="imagenet",
                           help="imagenet, random (seeded untrained, offline testing), "
                                "or a checkpoint path (default %(default)s)")
    extract_p.add_argument("--seed", type=int, default=0,
                           help="init seed for --weights random (default %(default)s)")
    extract_p.add_argument("--batch-size", type=int, default=8,
                           help="inference batch size (default %(default)s)")
    extract_p.add_argument("--strict", action="store_true",
                           help="fail on undecodable images instead of skipping")
    extract_p.add_argument("--json", action="store_true",
                           help="print the extraction summary as JSON")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        summary = extract_embeddings(
            images_dir=args.images,
            variant=args.variant,
            out=args.out,
            ids_prefix=args.ids_prefix,
            weights=args.weights,
            seed=args.seed,
            batch_size=args.batch_size,
            strict=args.strict,
        )
    except ExtractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        print(f"wrote {summary['count']} embeddings (dim {summary['dim']}) "
              f"to {summary['out']}")
        if summary["skipped"]:
            print(f"skipped {len(summary['skipped'])} undecodable images",
                  file=sys.stderr)
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
