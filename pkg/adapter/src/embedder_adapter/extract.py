"""GAP-feature extraction from image folders into CFGE embedding files.

Two model variants back the engine's two retrieval spaces: ``standard`` (an
ImageNet-trained backbone, texture space) and ``shape_biased`` (a backbone
trained on stylized data, shape space). The embedding of an image is the
global average pooling output of the backbone, taken after the final block's
activation, flattened to one float32 vector per image.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError
from torch import nn
from torchvision import models, transforms

from .cfge import SPACE_SHAPE, SPACE_TEXTURE, write_cfge

logger = logging.getLogger("embedder_adapter")

VARIANTS = ("standard", "shape_biased")
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".webp")

# torchvision's published preprocessing defaults for the pretrained backbone
RESIZE = 256
CROP = 224
MEAN = (0.485, 0.456, 0.406)
STD = (0.229, 0.224, 0.225)


class ExtractError(Exception):
    """Unusable inputs or configuration; messages are user-facing."""


def _preprocess() -> transforms.Compose:
    return transforms.Compose([
        transforms.Resize(RESIZE),
        transforms.CenterCrop(CROP),
        transforms.ToTensor(),
        transforms.Normalize(mean=MEAN, std=STD),
    ])


def build_backbone(weights: str, seed: int) -> nn.Module:
    """ResNet-50 trunk up to and including global average pooling.

    `weights` is "imagenet" (download the published checkpoint), "random"
    (seeded untrained init, for offline conformance testing), or a path to a
    state-dict checkpoint — the route for shape-biased weights, which the
    user supplies.
    """
    if weights == "imagenet":
        model = models.resnet50(weights=models.ResNet50_Weights.IMAGENET1K_V2)
    elif weights == "random":
        torch.manual_seed(seed)
        model = models.resnet50(weights=None)
    else:
        checkpoint = Path(weights)
        if not checkpoint.exists():
            raise ExtractError(f"weights checkpoint not found: {checkpoint}")
        model = models.resnet50(weights=None)
        state = torch.load(checkpoint, map_location="cpu", weights_only=True)
        if isinstance(state, dict) and "state_dict" in state:
            state = state["state_dict"]
        model.load_state_dict(state)
    trunk = nn.Sequential(*list(model.children())[:-1])  # drop the classifier head
    trunk.eval()
    return trunk


def list_images(images_dir: str | Path) -> list[Path]:
    root = Path(images_dir)
    if root.is_file():
        # single-image mode: lets the engine's pipeline hand one query image in
        return [root]
    if not root.is_dir():
        raise ExtractError(f"--images must name a directory or image file: {root}")
    found = sorted(p for p in root.iterdir()
                   if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    if not found:
        raise ExtractError(f"no images with suffixes {IMAGE_SUFFIXES} in {root}")
    return found


def extract_embeddings(
    images_dir: str | Path,
    variant: str,
    out: str | Path,
    ids_prefix: str = "",
    weights: str = "imagenet",
    seed: int = 0,
    batch_size: int = 8,
    strict: bool = False,
) -> dict:
    """Embed every image in a folder and write one CFGE file plus a sidecar.

    Image ids are the filename stems with `ids_prefix` prepended (gallery ids
    when embedding the generated set, "q_"-prefixed for queries). Undecodable
    images are skipped with a warning, or abort the run when `strict`.
    """
    if variant not in VARIANTS:
        raise ExtractError(f"variant must be one of {VARIANTS}, got {variant!r}")
    space = SPACE_TEXTURE if variant == "standard" else SPACE_SHAPE

    paths = list_images(images_dir)
    preprocess = _preprocess()
    tensors: list[torch.Tensor] = []
    ids: list[str] = []
    skipped: list[str] = []
    for path in paths:
        image_id = ids_prefix + path.stem
        if image_id in ids:
            raise ExtractError(f"duplicate image id {image_id!r} (from {path.name})")
        try:
            with Image.open(path) as image:
                tensors.append(preprocess(image.convert("RGB")))
        except (UnidentifiedImageError, OSError) as exc:
            if strict:
                raise ExtractError(f"cannot decode {path}: {exc}") from exc
            logger.warning("skipping undecodable image %s: %s", path, exc)
            skipped.append(path.name)
            continue
        ids.append(image_id)
    if not ids:
        raise ExtractError("every image in the folder was undecodable")

    trunk = build_backbone(weights, seed)
    vectors: list[np.ndarray] = []
    with torch.no_grad():
        for start in range(0, len(tensors), batch_size):
            batch = torch.stack(tensors[start:start + batch_size])
            features = trunk(batch)
            vectors.append(features.reshape(features.shape[0], -1).numpy()
                           .astype(np.float32))
    matrix = np.concatenate(vectors, axis=0)
    dim = int(matrix.shape[1])

    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_cfge(out_path, space, dict(zip(ids, matrix)))

    sidecar = {
        "variant": variant,
        "space": "texture" if space == SPACE_TEXTURE else "shape",
        "model": "resnet50",
        "weights": weights,
        "seed": seed if weights == "random" else None,
        "dim": dim,
        "features": "global average pooling output, post-activation, flattened",
        "preprocessing": {
            "resize": RESIZE,
            "center_crop": CROP,
            "normalize_mean": list(MEAN),
            "normalize_std": list(STD),
        },
        "count": len(ids),
        "skipped": skipped,
    }
    sidecar_path = out_path.with_name(out_path.name + ".meta.json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")

    return {"out": str(out_path), "sidecar": str(sidecar_path), "dim": dim,
            "count": len(ids), "skipped": skipped}
