"""Synthetic Mondrian scenes with exactly known ground truth.

A scene is a field of axis-aligned random rectangles over a random
background. The conditions the classical estimators assume can be forced
exactly at generation time: ACHROMATIC_MEAN rescales patch albedos so the
per-channel scene means coincide (the grey-world premise), and
include_white_patch plants a true (1,1,1) patch (the white-patch premise).
Rendering applies a single global illuminant or a two-illuminant field
blended along one axis, then additive Gaussian noise.

Datasets written by emit_dataset are regular manifests (see dataset.py)
plus a parallel canonical/ directory holding the ground-truth
white-balanced scene for each observed image, which is what paired
image-to-image trainers consume.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .color import ColorSpace, Illuminant, Image, apply_illuminant
from .dataset import (
    MANIFEST_FILENAME,
    Encoding,
    Manifest,
    SampleRecord,
    SceneTag,
    save_manifest,
)
from .errors import CCBenchError, InputDomainError
from .pngio import write_mask, write_png16

# Patch sides are drawn uniformly from this fraction range of the short
# image side. The lower bound keeps single patches from vanishing at small
# resolutions; the upper bound keeps any one patch from dominating the
# scene statistics, which is what lets edge-based estimators see enough
# transitions to work with.
PATCH_FRACTION_RANGE = (0.06, 0.20)

# Albedo floor. Keeps every canonical pixel far enough above zero that
# 16-bit quantization of the observed/canonical pair cannot disturb their
# per-pixel ratios at the tolerances the toolkit tests at.
ALBEDO_FLOOR = 0.05

MAX_NOISE_SIGMA = 0.1


class AlbedoDistribution(str, Enum):
    UNIFORM_RGB = "uniform_rgb"
    ACHROMATIC_MEAN = "achromatic_mean"


class BlendAxis(str, Enum):
    X = "x"
    Y = "y"


@dataclass(frozen=True)
class Blend:
    """Two-illuminant transition: logistic ramp along one axis.

    softness is the ramp scale in pixels; 0 degenerates to a hard step at
    the image midline.
    """

    axis: BlendAxis
    softness: float

    def __post_init__(self):
        if not (self.softness >= 0.0) or math.isinf(self.softness):
            raise InputDomainError(f"blend softness must be finite and >= 0, got {self.softness}")


@dataclass(frozen=True)
class SynthConfig:
    width: int
    height: int
    patch_count: int
    albedo_distribution: AlbedoDistribution
    illuminants: tuple[Illuminant, ...]
    blend: Blend | None = None
    noise_sigma: float = 0.0
    seed: int = 0
    include_white_patch: bool = False

    def __post_init__(self):
        object.__setattr__(self, "illuminants", tuple(self.illuminants))
        if self.width < 8 or self.height < 8:
            raise InputDomainError(f"image size must be at least 8x8, got {self.width}x{self.height}")
        if self.patch_count < 1:
            raise InputDomainError(f"patch_count must be >= 1, got {self.patch_count}")
        if len(self.illuminants) not in (1, 2):
            raise InputDomainError(f"need 1 or 2 illuminants, got {len(self.illuminants)}")
        if (self.blend is not None) != (len(self.illuminants) == 2):
            raise InputDomainError("blend must be present exactly when there are 2 illuminants")
        if not (0.0 <= self.noise_sigma < MAX_NOISE_SIGMA):
            raise InputDomainError(
                f"noise_sigma must lie in [0, {MAX_NOISE_SIGMA}), got {self.noise_sigma}"
            )


@dataclass(frozen=True)
class SynthSample:
    """One rendered scene pair.

    gt_illuminant is the scene illuminant for single-illuminant renders and
    the area-weighted mean of the per-pixel field for two-illuminant
    renders (the field itself is in gt_field, None for single).
    """

    canonical: Image
    observed: Image
    gt_illuminant: Illuminant
    gt_field: np.ndarray | None = None


def generate_scene(cfg: SynthConfig) -> Image:
    """Generate the canonical (white-balanced) Mondrian for a config.

    Deterministic in cfg.seed. Patch albedos are uniform in
    [ALBEDO_FLOOR, 1]; with include_white_patch the last-painted patch is
    forced to (1,1,1) so it survives occlusion; with ACHROMATIC_MEAN the
    non-white pixels are rescaled per channel so the full-image channel
    means come out exactly equal (the white patch itself is left alone).
    """
    rng = np.random.default_rng(cfg.seed)
    h, w = cfg.height, cfg.width
    short = min(h, w)
    lo = max(1, round(PATCH_FRACTION_RANGE[0] * short))
    hi = max(lo, round(PATCH_FRACTION_RANGE[1] * short))

    canvas = np.empty((h, w, 3), dtype=np.float64)
    canvas[:] = rng.uniform(ALBEDO_FLOOR, 1.0, 3)
    white = np.zeros((h, w), dtype=bool)
    for i in range(cfg.patch_count):
        pw = int(rng.integers(lo, hi + 1))
        ph = int(rng.integers(lo, hi + 1))
        x0 = int(rng.integers(0, max(1, w - pw + 1)))
        y0 = int(rng.integers(0, max(1, h - ph + 1)))
        is_white = cfg.include_white_patch and i == cfg.patch_count - 1
        canvas[y0 : y0 + ph, x0 : x0 + pw] = 1.0 if is_white else rng.uniform(ALBEDO_FLOOR, 1.0, 3)
        white[y0 : y0 + ph, x0 : x0 + pw] = is_white

    if cfg.albedo_distribution is AlbedoDistribution.ACHROMATIC_MEAN:
        rest = ~white
        sums = canvas[rest].sum(axis=0)
        # scale factors <= 1, so values stay within (0, 1]
        canvas[rest] *= sums.min() / sums
    return Image(canvas, None, ColorSpace.LINEAR)


def _illuminant_field(cfg: SynthConfig, h: int, w: int) -> np.ndarray:
    """Per-pixel (H, W, 3) illuminant field for the two-illuminant case.

    Every pixel's illuminant is a convex combination of the two endpoints:
    weight = logistic((coord - midline) / softness), a hard step when
    softness is 0.
    """
    e1 = cfg.illuminants[0].as_array()
    e2 = cfg.illuminants[1].as_array()
    n = w if cfg.blend.axis is BlendAxis.X else h
    coord = np.arange(n, dtype=np.float64)
    center = (n - 1) / 2.0
    if cfg.blend.softness == 0.0:
        alpha = (coord >= center).astype(np.float64)
    else:
        alpha = 1.0 / (1.0 + np.exp(-(coord - center) / cfg.blend.softness))
    shape = (1, n, 1) if cfg.blend.axis is BlendAxis.X else (n, 1, 1)
    alpha = alpha.reshape(shape)
    return np.broadcast_to((1.0 - alpha) * e1 + alpha * e2, (h, w, 3)).copy()


def render(canonical: Image, cfg: SynthConfig) -> SynthSample:
    """Render a canonical scene under the configured illumination.

    observed = illuminant field x canonical + Gaussian noise, clipped at 0.
    The noise stream is keyed off (seed, 1) so it is independent of the
    scene-geometry stream but still reproducible from the config alone.
    """
    h, w = canonical.height, canonical.width
    if len(cfg.illuminants) == 1:
        e = cfg.illuminants[0]
        observed = apply_illuminant(canonical, e).data
        gt, field = e, None
    else:
        field = _illuminant_field(cfg, h, w)
        observed = canonical.data * field
        gt = Illuminant.from_array(field.mean(axis=(0, 1)))
    if cfg.noise_sigma > 0.0:
        noise_rng = np.random.default_rng([cfg.seed, 1])
        observed = observed + noise_rng.normal(0.0, cfg.noise_sigma, observed.shape)
    observed = np.clip(observed, 0.0, None)
    return SynthSample(canonical, Image(observed, canonical.mask, ColorSpace.LINEAR), gt, field)


def make_sample(cfg: SynthConfig) -> SynthSample:
    """generate_scene + render in one step."""
    return render(generate_scene(cfg), cfg)


def _child_seed(master_seed: int, sample_id: str) -> int:
    """Per-sample PRNG seed derived from the master seed and the id string,
    by the same hashing idea the splitter uses, so sample i's content never
    depends on how many samples precede it."""
    digest = hashlib.sha256(f"{master_seed}:{sample_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def emit_dataset(cfg: SynthConfig, count: int, out_dir: str | os.PathLike) -> Manifest:
    """Write a dataset of `count` rendered scenes under out_dir.

    Layout: images/<id>.png (observed, 16-bit linear), canonical/<id>.png
    (ground-truth white-balanced scene), masks/<id>.png (all-in), and
    manifest.json. Observed images whose peak exceeds 1.0 (bright
    illuminants, noise) are scaled by 1/peak before quantization; the
    illuminant is defined only up to scale, so this changes no metric.
    The manifest's gt_illuminant is the scene illuminant, or the
    area-weighted mean of the field for two-illuminant scenes (metadata
    multi=true marks that case).
    """
    if count < 1:
        raise InputDomainError(f"count must be >= 1, got {count}")
    out_dir = os.fspath(out_dir)
    for sub in ("images", "canonical", "masks"):
        os.makedirs(os.path.join(out_dir, sub), exist_ok=True)

    records = []
    all_in = np.ones((cfg.height, cfg.width), dtype=bool)
    for i in range(count):
        sid = f"s{i:04d}"
        sample_cfg = replace(cfg, seed=_child_seed(cfg.seed, sid))
        sample = make_sample(sample_cfg)
        obs = sample.observed.data
        peak = float(obs.max(initial=0.0))
        if peak > 1.0:
            obs = obs / peak
        write_png16(os.path.join(out_dir, "images", f"{sid}.png"), Image(obs, None, ColorSpace.LINEAR))
        write_png16(os.path.join(out_dir, "canonical", f"{sid}.png"), sample.canonical)
        write_mask(os.path.join(out_dir, "masks", f"{sid}.png"), all_in)
        records.append(
            SampleRecord(
                id=sid,
                image_path=os.path.join(out_dir, "images", f"{sid}.png"),
                gt_illuminant=sample.gt_illuminant,
                mask_path=os.path.join(out_dir, "masks", f"{sid}.png"),
                scene_tag=SceneTag.UNKNOWN,
                encoding=Encoding.LINEAR16,
            )
        )
    name = os.path.basename(os.path.normpath(out_dir)) or "synth"
    manifest = Manifest(name, tuple(records), {"multi": len(cfg.illuminants) == 2})
    save_manifest(manifest, os.path.join(out_dir, MANIFEST_FILENAME))
    return manifest


def synth_config_from_dict(doc: dict) -> SynthConfig:
    """Build a SynthConfig from parsed JSON, naming the offending field on error."""
    if not isinstance(doc, dict):
        raise InputDomainError("synth config must be a JSON object")
    known = {
        "width", "height", "patch_count", "albedo_distribution", "illuminants",
        "blend", "noise_sigma", "seed", "include_white_patch",
    }
    unknown = set(doc) - known
    if unknown:
        raise InputDomainError(f"synth config: unknown field(s) {sorted(unknown)}")

    def need(field_name, kind):
        if field_name not in doc:
            raise InputDomainError(f"synth config: missing field '{field_name}'")
        value = doc[field_name]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        # bool subclasses int; a bare true/false is never a valid number here
        if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
            raise InputDomainError(
                f"synth config: field '{field_name}' must be {kind.__name__}, "
                f"got {type(value).__name__}"
            )
        return value

    try:
        albedo = AlbedoDistribution(need("albedo_distribution", str))
    except ValueError:
        raise InputDomainError(
            f"synth config: albedo_distribution must be one of "
            f"{[a.value for a in AlbedoDistribution]}"
        ) from None
    raw_ills = doc.get("illuminants")
    if not isinstance(raw_ills, list) or not raw_ills:
        raise InputDomainError("synth config: 'illuminants' must be a non-empty list")
    try:
        illuminants = tuple(Illuminant.from_array(v) for v in raw_ills)
    except (CCBenchError, TypeError, ValueError) as e:
        raise InputDomainError(f"synth config: bad illuminant: {e}") from None
    blend = None
    if doc.get("blend") is not None:
        b = doc["blend"]
        if not isinstance(b, dict) or set(b) - {"axis", "softness"}:
            raise InputDomainError("synth config: blend must be {axis, softness}")
        try:
            axis = BlendAxis(b.get("axis"))
        except ValueError:
            raise InputDomainError(
                f"synth config: blend axis must be one of {[a.value for a in BlendAxis]}"
            ) from None
        softness = b.get("softness")
        if not isinstance(softness, (int, float)) or isinstance(softness, bool):
            raise InputDomainError("synth config: blend softness must be a number")
        blend = Blend(axis, float(softness))
    return SynthConfig(
        width=need("width", int),
        height=need("height", int),
        patch_count=need("patch_count", int),
        albedo_distribution=albedo,
        illuminants=illuminants,
        blend=blend,
        noise_sigma=need("noise_sigma", float) if "noise_sigma" in doc else 0.0,
        seed=need("seed", int) if "seed" in doc else 0,
        include_white_patch=need("include_white_patch", bool) if "include_white_patch" in doc else False,
    )


def load_synth_config(path: str | os.PathLike) -> SynthConfig:
    """Read a synth config JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise InputDomainError(f"{path}: not valid JSON ({e})") from None
    return synth_config_from_dict(doc)
