"""Gallery enumeration: every code combination the generator accepts, with stable ids.

The gallery manifest is the ground-truth record of which codes produced which
image. Image pixels are never stored here; an external generator owns them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import FormatError, NotFoundError, ValidationError, VersionError

MANIFEST_VERSION = 1
DEFAULT_NOISE_COUNT = 10  # generator convention: ten noise variants per code pair


class BackgroundPolicy(Enum):
    """Rule deciding the background code relative to the other axes."""

    TIED_TO_TEXTURE = "tied"
    INDEPENDENT = "independent"
    FIXED = "fixed"


@dataclass(frozen=True)
class CodeSpace:
    """Axis sizes of the generator's code space plus the background rule."""

    n_shape: int
    n_texture: int
    n_noise: int = DEFAULT_NOISE_COUNT
    n_background: int = 1
    background_policy: BackgroundPolicy = BackgroundPolicy.TIED_TO_TEXTURE
    fixed_background: int | None = None

    def __post_init__(self):
        for name in ("n_shape", "n_texture", "n_noise", "n_background"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
        if self.background_policy is BackgroundPolicy.FIXED:
            i = self.fixed_background
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < self.n_background:
                raise ValidationError(
                    f"fixed_background must lie in [0, {self.n_background}), got {i!r}"
                )
        elif self.fixed_background is not None:
            raise ValidationError("fixed_background is only valid with the fixed policy")

    @property
    def size(self) -> int:
        """Exact number of gallery entries this space enumerates to."""
        base = self.n_shape * self.n_texture * self.n_noise
        if self.background_policy is BackgroundPolicy.INDEPENDENT:
            return base * self.n_background
        return base

    def background_for(self, texture: int) -> int | None:
        """Background implied by the policy, or None when the axis is free."""
        if self.background_policy is BackgroundPolicy.TIED_TO_TEXTURE:
            return texture % self.n_background
        if self.background_policy is BackgroundPolicy.FIXED:
            return self.fixed_background
        return None


@dataclass(frozen=True, order=True)
class CodeTuple:
    """One point in the generator's code space."""

    background: int
    shape: int
    texture: int
    noise: int

    def validate(self, space: CodeSpace) -> None:
        bounds = (
            ("background", self.background, space.n_background),
            ("shape", self.shape, space.n_shape),
            ("texture", self.texture, space.n_texture),
            ("noise", self.noise, space.n_noise),
        )
        for name, value, limit in bounds:
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < limit:
                raise ValidationError(f"{name} index {value!r} out of range [0, {limit})")
        expected = space.background_for(self.texture)
        if expected is not None and self.background != expected:
            raise ValidationError(
                f"background {self.background} inconsistent with "
                f"{space.background_policy.value} policy (expected {expected})"
            )


def image_id_for(codes: CodeTuple) -> str:
    """Deterministic image id for a code tuple."""
    return f"g_b{codes.background}_s{codes.shape}_t{codes.texture}_z{codes.noise}"


@dataclass(frozen=True)
class GalleryEntry:
    image_id: str
    codes: CodeTuple
    image_path: str | None = None


def _entry_sort_key(entry: GalleryEntry) -> tuple[int, int, int, int]:
    c = entry.codes
    return (c.shape, c.texture, c.noise, c.background)


@dataclass(frozen=True)
class GalleryManifest:
    """Immutable, validated record of the enumerated gallery."""

    code_space: CodeSpace
    entries: tuple[GalleryEntry, ...]
    version: int = MANIFEST_VERSION
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.version != MANIFEST_VERSION:
            raise ValidationError(f"manifest version must be {MANIFEST_VERSION}, got {self.version!r}")
        if len(self.entries) != self.code_space.size:
            raise ValidationError(
                f"entry count {len(self.entries)} does not match the code space "
                f"cardinality {self.code_space.size}"
            )
        by_id: dict[str, GalleryEntry] = {}
        previous_key = None
        for entry in self.entries:
            entry.codes.validate(self.code_space)
            if entry.image_id != image_id_for(entry.codes):
                raise ValidationError(
                    f"image id {entry.image_id!r} does not match its codes "
                    f"(expected {image_id_for(entry.codes)!r})"
                )
            if entry.image_id in by_id:
                raise ValidationError(f"duplicate image id {entry.image_id!r}")
            key = _entry_sort_key(entry)
            if previous_key is not None and key <= previous_key:
                raise ValidationError(
                    f"entries out of order at {entry.image_id!r}: manifests sort by "
                    "(shape, texture, noise, background)"
                )
            previous_key = key
            by_id[entry.image_id] = entry
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._by_id

    def lookup(self, image_id: str) -> GalleryEntry:
        try:
            return self._by_id[image_id]
        except KeyError:
            raise NotFoundError(image_id) from None

    def image_ids(self) -> tuple[str, ...]:
        return tuple(e.image_id for e in self.entries)


def enumerate_gallery(space: CodeSpace) -> GalleryManifest:
    """Enumerate every code combination of `space` in canonical order.

    Deterministic: equal spaces yield identical manifests. Entries sort by
    (shape, texture, noise, background); the background axis only varies under
    the independent policy.
    """
    entries = []
    for shape in range(space.n_shape):
        for texture in range(space.n_texture):
            for noise in range(space.n_noise):
                if space.background_policy is BackgroundPolicy.INDEPENDENT:
                    backgrounds = range(space.n_background)
                else:
                    backgrounds = (space.background_for(texture),)
                for background in backgrounds:
                    codes = CodeTuple(background, shape, texture, noise)
                    entries.append(GalleryEntry(image_id_for(codes), codes))
    return GalleryManifest(code_space=space, entries=tuple(entries))


def manifest_to_json_dict(manifest: GalleryManifest) -> dict:
    space = manifest.code_space
    code_space: dict = {
        "n_background": space.n_background,
        "n_shape": space.n_shape,
        "n_texture": space.n_texture,
        "n_noise": space.n_noise,
        "background_policy": space.background_policy.value,
    }
    if space.fixed_background is not None:
        code_space["fixed_background"] = space.fixed_background
    entries = []
    for entry in manifest.entries:
        record: dict = {
            "id": entry.image_id,
            "background": entry.codes.background,
            "shape": entry.codes.shape,
            "texture": entry.codes.texture,
            "noise": entry.codes.noise,
        }
        if entry.image_path is not None:
            record["path"] = entry.image_path
        entries.append(record)
    return {"version": manifest.version, "code_space": code_space, "entries": entries}


def save_manifest(manifest: GalleryManifest, destination: str | Path) -> None:
    """Write the manifest as canonical UTF-8 JSON (byte-deterministic)."""
    text = json.dumps(manifest_to_json_dict(manifest), indent=2) + "\n"
    Path(destination).write_bytes(text.encode("utf-8"))


def _require(doc: dict, key: str, kind: type, where: str):
    if key not in doc:
        raise FormatError(f"{where} is missing required key {key!r}")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise FormatError(f"{where} key {key!r} must be {kind.__name__}, got {type(value).__name__}")
    return value


def load_manifest(source: str | Path) -> GalleryManifest:
    """Load and fully validate a manifest JSON file.

    Raises FormatError for unparseable documents, VersionError for unsupported
    versions, and ValidationError for invariant violations.
    """
    raw = Path(source).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"malformed manifest JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("manifest root must be an object")

    version = _require(doc, "version", int, "manifest")
    if version != MANIFEST_VERSION:
        raise VersionError(f"unsupported manifest version {version} (expected {MANIFEST_VERSION})")

    space_doc = _require(doc, "code_space", dict, "manifest")
    policy_name = _require(space_doc, "background_policy", str, "code_space")
    try:
        policy = BackgroundPolicy(policy_name)
    except ValueError:
        raise FormatError(f"unknown background_policy {policy_name!r}") from None
    fixed = space_doc.get("fixed_background")
    if fixed is not None and (not isinstance(fixed, int) or isinstance(fixed, bool)):
        raise FormatError("fixed_background must be an integer")
    space = CodeSpace(
        n_shape=_require(space_doc, "n_shape", int, "code_space"),
        n_texture=_require(space_doc, "n_texture", int, "code_space"),
        n_noise=_require(space_doc, "n_noise", int, "code_space"),
        n_background=_require(space_doc, "n_background", int, "code_space"),
        background_policy=policy,
        fixed_background=fixed,
    )

    entry_docs = _require(doc, "entries", list, "manifest")
    entries = []
    for i, entry_doc in enumerate(entry_docs):
        if not isinstance(entry_doc, dict):
            raise FormatError(f"entry #{i} must be an object")
        where = f"entry #{i}"
        codes = CodeTuple(
            background=_require(entry_doc, "background", int, where),
            shape=_require(entry_doc, "shape", int, where),
            texture=_require(entry_doc, "texture", int, where),
            noise=_require(entry_doc, "noise", int, where),
        )
        path = entry_doc.get("path")
        if path is not None and not isinstance(path, str):
            raise FormatError(f"{where} key 'path' must be a string")
        entries.append(GalleryEntry(_require(entry_doc, "id", str, where), codes, path))
    return GalleryManifest(code_space=space, entries=tuple(entries), version=version)
