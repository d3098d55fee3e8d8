"""Manifest-driven dataset access: sample records, deterministic train/test
splitting, and the file-based bridge through which external models deliver
predictions for scoring.

A dataset on disk is one JSON manifest naming PNG image files, per-sample
ground-truth illuminants, optional masks, scene tags, and the pixel
encoding. Paths inside a manifest resolve relative to the manifest's own
directory, so a dataset tree can be moved as a unit.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum

from .color import ColorSpace, Illuminant, Image, srgb_to_linear
from .errors import BridgeError, CCBenchError, InputDomainError, ManifestError
from .pngio import png_header, read_mask, read_png_raw

MANIFEST_VERSION = 1
MANIFEST_FILENAME = "manifest.json"
BRIDGE_FILENAME = "predictions.json"

_SAMPLE_FIELDS = {"id", "image_path", "gt_illuminant", "mask_path", "scene_tag", "encoding"}


class SceneTag(str, Enum):
    INDOOR = "indoor"
    OUTDOOR = "outdoor"
    UNKNOWN = "unknown"


class Encoding(str, Enum):
    SRGB8 = "srgb8"
    LINEAR16 = "linear16"


class PredictionKind(str, Enum):
    WHITE_BALANCED_IMAGE = "white_balanced_image"
    ILLUMINANT_TRIPLE = "illuminant_triple"


@dataclass(frozen=True)
class SampleRecord:
    id: str
    image_path: str
    gt_illuminant: Illuminant
    mask_path: str | None = None
    scene_tag: SceneTag = SceneTag.UNKNOWN
    encoding: Encoding = Encoding.LINEAR16


@dataclass(frozen=True)
class Manifest:
    """Named, ordered, immutable collection of sample records.

    The sample order is the canonical order for iteration and reporting;
    split membership never depends on it (see split_manifest).
    """

    name: str
    samples: tuple[SampleRecord, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise ManifestError("manifest has no samples")
        seen = set()
        for rec in self.samples:
            if rec.id in seen:
                raise ManifestError(f"duplicate sample id {rec.id!r}")
            seen.add(rec.id)

    def ids(self) -> tuple[str, ...]:
        return tuple(rec.id for rec in self.samples)

    def by_id(self, sample_id: str) -> SampleRecord:
        for rec in self.samples:
            if rec.id == sample_id:
                return rec
        raise KeyError(sample_id)


@dataclass(frozen=True)
class Split:
    """Disjoint train/test id sets covering one manifest exactly."""

    train_ids: frozenset[str]
    test_ids: frozenset[str]
    seed: int
    ratio: float

    def train_samples(self, m: Manifest) -> tuple[SampleRecord, ...]:
        return tuple(r for r in m.samples if r.id in self.train_ids)

    def test_samples(self, m: Manifest) -> tuple[SampleRecord, ...]:
        return tuple(r for r in m.samples if r.id in self.test_ids)


@dataclass(frozen=True)
class PredictionSet:
    """Validated external predictions for one test split.

    entries maps sample id to an absolute image path (WHITE_BALANCED_IMAGE)
    or an Illuminant (ILLUMINANT_TRIPLE), never a mixture.
    """

    model_name: str
    kind: PredictionKind
    entries: dict


def split_manifest(m: Manifest, seed: int, ratio: float = 0.8) -> Split:
    """Deterministic train/test split of a manifest.

    The shuffle is defined without reference to any library PRNG so that
    independent implementations agree byte for byte: sample ids are ordered
    by the hex digest of sha256("{seed}:{id}") and the first
    round_half_up(ratio * N) ids form the training set. Membership is a
    pure function of the id set, the seed and the ratio; manifest insertion
    order plays no part.
    """
    if not (0.0 < ratio < 1.0):
        raise InputDomainError(f"split ratio must lie in (0, 1), got {ratio}")
    ids = sorted(m.ids())
    shuffled = sorted(
        ids, key=lambda sid: (hashlib.sha256(f"{seed}:{sid}".encode()).hexdigest(), sid)
    )
    n_train = math.floor(ratio * len(ids) + 0.5)
    return Split(frozenset(shuffled[:n_train]), frozenset(shuffled[n_train:]), seed, ratio)


def load_manifest(path: str | os.PathLike) -> Manifest:
    """Load and eagerly validate a manifest JSON file.

    Validation covers: JSON shape and version, unique ids, strictly
    positive ground-truth illuminants, legal scene/encoding tags, existence
    of every referenced image file, and mask dimensions (checked against
    the image header without decoding pixels). Missing files raise
    FileNotFoundError listing the offending sample ids; everything else
    raises ManifestError.
    """
    path = os.fspath(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ManifestError(f"{path}: not valid JSON ({e})") from None

    if not isinstance(doc, dict):
        raise ManifestError(f"{path}: top level must be a JSON object")
    if doc.get("version") != MANIFEST_VERSION:
        raise ManifestError(
            f"{path}: unsupported manifest version {doc.get('version')!r} "
            f"(expected {MANIFEST_VERSION})"
        )
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise ManifestError(f"{path}: 'name' must be a non-empty string")
    raw_samples = doc.get("samples")
    if not isinstance(raw_samples, list) or not raw_samples:
        raise ManifestError(f"{path}: 'samples' must be a non-empty list")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ManifestError(f"{path}: 'metadata' must be an object")

    base = os.path.dirname(os.path.abspath(path))
    records = [_parse_sample(obj, base, i) for i, obj in enumerate(raw_samples)]
    manifest = Manifest(name, tuple(records), metadata)

    missing = [r.id for r in records if not os.path.exists(r.image_path)]
    missing += [r.id for r in records if r.mask_path and not os.path.exists(r.mask_path)]
    if missing:
        raise FileNotFoundError(
            f"{path}: missing image/mask files for sample(s): {', '.join(sorted(set(missing)))}"
        )
    for rec in records:
        if rec.mask_path:
            iw, ih, _ = png_header(rec.image_path)
            mw, mh, _ = png_header(rec.mask_path)
            if (iw, ih) != (mw, mh):
                raise ManifestError(
                    f"sample {rec.id!r}: mask is {mw}x{mh} but image is {iw}x{ih}"
                )
    return manifest


def _parse_sample(obj, base: str, index: int) -> SampleRecord:
    if not isinstance(obj, dict):
        raise ManifestError(f"sample #{index}: must be a JSON object")
    sid = obj.get("id")
    label = repr(sid) if isinstance(sid, str) and sid else f"#{index}"
    unknown = set(obj) - _SAMPLE_FIELDS
    if unknown:
        raise ManifestError(f"sample {label}: unknown field(s) {sorted(unknown)}")
    if not isinstance(sid, str) or not sid:
        raise ManifestError(f"sample {label}: 'id' must be a non-empty string")
    image_path = obj.get("image_path")
    if not isinstance(image_path, str) or not image_path:
        raise ManifestError(f"sample {label}: 'image_path' must be a non-empty string")
    try:
        gt = Illuminant.from_array(obj.get("gt_illuminant"))
    except (CCBenchError, TypeError, ValueError) as e:
        raise ManifestError(f"sample {label}: bad gt_illuminant: {e}") from None
    mask_path = obj.get("mask_path")
    if mask_path is not None and (not isinstance(mask_path, str) or not mask_path):
        raise ManifestError(f"sample {label}: 'mask_path' must be a non-empty string or null")
    try:
        scene = SceneTag(obj.get("scene_tag", SceneTag.UNKNOWN.value))
    except ValueError:
        raise ManifestError(
            f"sample {label}: scene_tag must be one of {[t.value for t in SceneTag]}"
        ) from None
    try:
        encoding = Encoding(obj["encoding"])
    except KeyError:
        raise ManifestError(f"sample {label}: 'encoding' is required") from None
    except ValueError:
        raise ManifestError(
            f"sample {label}: encoding must be one of {[e.value for e in Encoding]}"
        ) from None
    return SampleRecord(
        id=sid,
        image_path=os.path.join(base, image_path),
        gt_illuminant=gt,
        mask_path=os.path.join(base, mask_path) if mask_path else None,
        scene_tag=scene,
        encoding=encoding,
    )


def save_manifest(m: Manifest, path: str | os.PathLike) -> None:
    """Write a manifest as JSON with paths relative to the target directory."""
    path = os.fspath(path)
    base = os.path.dirname(os.path.abspath(path))
    doc = {
        "version": MANIFEST_VERSION,
        "name": m.name,
        "metadata": m.metadata,
        "samples": [
            {
                "id": rec.id,
                "image_path": os.path.relpath(rec.image_path, base),
                "gt_illuminant": list(rec.gt_illuminant.as_array()),
                "mask_path": os.path.relpath(rec.mask_path, base) if rec.mask_path else None,
                "scene_tag": rec.scene_tag.value,
                "encoding": rec.encoding.value,
            }
            for rec in m.samples
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_sample(rec: SampleRecord) -> Image:
    """Load one sample to a LINEAR-tagged image with its mask applied.

    The encoding tag is honored strictly: SRGB8 files must be 8-bit and are
    decoded through the sRGB transfer curve; LINEAR16 files must be 16-bit
    and are scaled by 1/65535. A file whose bit depth contradicts the tag
    raises ManifestError rather than silently rescaling.
    """
    raw, depth = read_png_raw(rec.image_path)
    expected = 8 if rec.encoding is Encoding.SRGB8 else 16
    if depth != expected:
        raise ManifestError(
            f"sample {rec.id!r}: encoding {rec.encoding.value} expects "
            f"{expected}-bit data but {rec.image_path} is {depth}-bit"
        )
    data = raw.astype(float) / float((1 << depth) - 1)
    if rec.encoding is Encoding.SRGB8:
        data = srgb_to_linear(data)
    mask = None
    if rec.mask_path:
        mask = read_mask(rec.mask_path)
        if mask.shape != data.shape[:2]:
            raise ManifestError(
                f"sample {rec.id!r}: mask {mask.shape} does not match image {data.shape[:2]}"
            )
    return Image(data, mask, ColorSpace.LINEAR)


def load_predictions(path: str | os.PathLike, manifest: Manifest, split: Split) -> PredictionSet:
    """Load and validate a prediction bridge against a test split.

    ``path`` is the bridge directory (containing predictions.json) or the
    JSON file itself. The bridge must cover the test split exactly: a
    missing or extra id, a mixed prediction kind, an unreadable image path
    or a malformed triple all raise BridgeError naming the offender.
    """
    p = os.fspath(path)
    json_path = os.path.join(p, BRIDGE_FILENAME) if os.path.isdir(p) else p
    base = os.path.dirname(os.path.abspath(json_path))
    try:
        with open(json_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise BridgeError(f"no predictions file at {json_path}") from None
    except json.JSONDecodeError as e:
        raise BridgeError(f"{json_path}: not valid JSON ({e})") from None

    if not isinstance(doc, dict):
        raise BridgeError(f"{json_path}: top level must be a JSON object")
    model_name = doc.get("model_name")
    if not isinstance(model_name, str) or not model_name:
        raise BridgeError(f"{json_path}: 'model_name' must be a non-empty string")
    try:
        kind = PredictionKind(doc.get("kind"))
    except ValueError:
        raise BridgeError(
            f"{json_path}: kind must be one of {[k.value for k in PredictionKind]}"
        ) from None
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, dict):
        raise BridgeError(f"{json_path}: 'entries' must be an object mapping id to prediction")

    missing = sorted(split.test_ids - set(raw_entries))
    if missing:
        raise BridgeError(f"missing prediction(s) for test id(s): {', '.join(missing)}")
    extra = sorted(set(raw_entries) - split.test_ids)
    if extra:
        raise BridgeError(f"prediction(s) for id(s) outside the test split: {', '.join(extra)}")

    entries = {}
    for sid, value in raw_entries.items():
        if kind is PredictionKind.WHITE_BALANCED_IMAGE:
            if not isinstance(value, str):
                raise BridgeError(
                    f"entry {sid!r}: kind {kind.value} requires an image path, "
                    f"got {type(value).__name__} (mixed kinds?)"
                )
            img_path = os.path.join(base, value)
            if not os.path.exists(img_path):
                raise BridgeError(f"entry {sid!r}: prediction image not found: {img_path}")
            entries[sid] = img_path
        else:
            if isinstance(value, str):
                raise BridgeError(
                    f"entry {sid!r}: kind {kind.value} requires a 3-number list, "
                    f"got a string (mixed kinds?)"
                )
            try:
                entries[sid] = Illuminant.from_array(value)
            except (CCBenchError, TypeError, ValueError) as e:
                raise BridgeError(f"entry {sid!r}: bad illuminant triple: {e}") from None
    return PredictionSet(model_name, kind, entries)
