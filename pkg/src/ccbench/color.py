"""Core color machinery: linear/sRGB conversion, diagonal (von Kries)
illuminant application and correction, illuminant recovery from a
white-balanced estimate, and the angular error metric.

Conventions used throughout the toolkit:

* Images are (H, W, 3) float64 rasters in linear radiometric scale unless
  tagged as sRGB-encoded. Linear values may exceed 1 (saturated sensor
  data); sRGB-encoded values live in [0, 1].
* An illuminant is a strictly positive RGB gain triple, meaningful only up
  to positive scale. The canonical form has unit L2 norm.
* Angles are degrees everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateIlluminantError,
    InputDomainError,
    InsufficientSupportError,
)

# sRGB transfer curve constants (IEC 61966-2-1 piecewise definition)
_SRGB_DECODE_KNEE = 0.04045
_SRGB_ENCODE_KNEE = 0.0031308
_SRGB_SLOPE = 12.92
_SRGB_OFFSET = 0.055
_SRGB_GAMMA = 2.4

# Relative threshold below which a denominator pixel is considered unusable,
# and the minimum fraction of pixels that must survive that filter.
RATIO_EPS_FACTOR = 1e-6
MIN_SUPPORT_FRACTION = 0.01


class ColorSpace(str, Enum):
    LINEAR = "linear"
    SRGB = "srgb"


class Aggregator(str, Enum):
    MEDIAN = "median"
    MEAN = "mean"


@dataclass(frozen=True)
class Illuminant:
    """Strictly positive RGB gain triple; e and k*e (k>0) are the same light."""

    r: float
    g: float
    b: float

    def __post_init__(self):
        for name, v in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not math.isfinite(v) or v <= 0.0:
                raise DegenerateIlluminantError(
                    f"illuminant component {name}={v!r} must be finite and > 0"
                )

    @classmethod
    def from_array(cls, arr) -> "Illuminant":
        arr = np.asarray(arr, dtype=np.float64).reshape(-1)
        if arr.size != 3:
            raise InputDomainError(f"illuminant needs 3 components, got {arr.size}")
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64)

    def normalized(self) -> "Illuminant":
        """Canonical unit-L2 representative of the scale class."""
        v = self.as_array()
        return Illuminant.from_array(v / np.linalg.norm(v))


@dataclass(frozen=True)
class Image:
    """Immutable RGB raster with an optional participation mask.

    ``mask`` marks pixels that take part in statistics (True = in). Values
    of masked-out pixels are never read by estimators or metrics, so the
    finite/non-negative invariants are enforced on masked-in pixels only.
    """

    data: np.ndarray
    mask: np.ndarray | None = None
    space: ColorSpace = ColorSpace.LINEAR

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 3:
            raise InputDomainError(f"image data must be (H, W, 3), got {data.shape}")
        mask = self.mask
        if mask is not None:
            mask = np.array(mask, dtype=bool)
            if mask.shape != data.shape[:2]:
                raise InputDomainError(
                    f"mask shape {mask.shape} does not match image {data.shape[:2]}"
                )
            mask.flags.writeable = False
        vals = data if mask is None else data[mask]
        if not np.all(np.isfinite(vals)):
            raise InputDomainError("image contains non-finite masked-in values")
        if self.space is ColorSpace.LINEAR:
            if vals.size and vals.min() < 0.0:
                raise InputDomainError("linear image values must be >= 0")
        else:
            if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
                raise InputDomainError("sRGB-encoded values must lie in [0, 1]")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "mask", mask)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def valid_mask(self) -> np.ndarray:
        """Boolean (H, W) mask of participating pixels (all-True if unmasked)."""
        if self.mask is None:
            return np.ones(self.data.shape[:2], dtype=bool)
        return self.mask


def _require_linear(img: Image, what: str) -> None:
    if img.space is not ColorSpace.LINEAR:
        raise InputDomainError(f"{what} requires a LINEAR-tagged image")


def srgb_to_linear(values):
    """Apply the sRGB electro-optical transfer function elementwise.

    Accepts scalars or arrays with values in [0, 1]; 0 and 1 are fixed points.
    """
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise InputDomainError("sRGB decode input must lie in [0, 1]")
    out = np.where(
        arr <= _SRGB_DECODE_KNEE,
        arr / _SRGB_SLOPE,
        ((arr + _SRGB_OFFSET) / (1.0 + _SRGB_OFFSET)) ** _SRGB_GAMMA,
    )
    return float(out) if np.isscalar(values) else out


def linear_to_srgb(values):
    """Inverse of srgb_to_linear; input must lie in [0, 1] (clip first)."""
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise InputDomainError("sRGB encode input must lie in [0, 1]")
    out = np.where(
        arr <= _SRGB_ENCODE_KNEE,
        arr * _SRGB_SLOPE,
        (1.0 + _SRGB_OFFSET) * arr ** (1.0 / _SRGB_GAMMA) - _SRGB_OFFSET,
    )
    return float(out) if np.isscalar(values) else out


def _sanitize_masked_out(img: Image) -> np.ndarray:
    """Image data with masked-out pixels zeroed. Masked-out values carry no
    meaning and may be arbitrary garbage; zeroing them keeps elementwise
    transfer curves from tripping over values they would never legitimately
    see."""
    if img.mask is None:
        return img.data
    return np.where(img.mask[:, :, None], img.data, 0.0)


def srgb_decode(img: Image) -> Image:
    """Decode an sRGB-encoded image to linear radiometric scale."""
    if img.space is not ColorSpace.SRGB:
        raise InputDomainError("srgb_decode expects an SRGB-tagged image")
    return Image(srgb_to_linear(_sanitize_masked_out(img)), img.mask, ColorSpace.LINEAR)


def srgb_encode(img: Image) -> Image:
    """Encode a linear image (values in [0, 1]) to sRGB."""
    _require_linear(img, "srgb_encode")
    return Image(linear_to_srgb(_sanitize_masked_out(img)), img.mask, ColorSpace.SRGB)


def apply_illuminant(canonical: Image, e: Illuminant) -> Image:
    """Render a canonical (white-balanced) image under illuminant e.

    Per-pixel, per-channel product with the gain triple; the mask passes
    through unchanged.
    """
    _require_linear(canonical, "apply_illuminant")
    return Image(canonical.data * e.as_array(), canonical.mask, ColorSpace.LINEAR)


def correct_von_kries(observed: Image, e: Illuminant) -> Image:
    """White-balance an observed image with the diagonal gain model.

    Divides each channel by the corresponding illuminant component, i.e.
    multiplies by diag(1/e_r, 1/e_g, 1/e_b). Exact inverse of
    apply_illuminant with the same e.
    """
    _require_linear(observed, "correct_von_kries")
    return Image(observed.data / e.as_array(), observed.mask, ColorSpace.LINEAR)


def recover_illuminant(
    input_img: Image,
    predicted_white: Image,
    aggregator: Aggregator = Aggregator.MEDIAN,
) -> Illuminant:
    """Recover the scene illuminant from an input image and a white-balanced
    estimate of the same scene.

    For every masked-in pixel whose predicted channel value exceeds
    eps = RATIO_EPS_FACTOR x (max masked-in predicted value), the channel
    ratio input/predicted is formed; the per-channel ratios are reduced with
    the chosen aggregator (median by default, robust against locally wrong
    predictions) and the result is normalized to unit L2 norm.

    Raises InsufficientSupportError when fewer than MIN_SUPPORT_FRACTION of
    the shared masked-in pixels survive the epsilon filter on any channel.
    """
    _require_linear(input_img, "recover_illuminant")
    _require_linear(predicted_white, "recover_illuminant")
    if input_img.data.shape != predicted_white.data.shape:
        raise InputDomainError(
            f"image dimensions differ: {input_img.data.shape[:2]} vs "
            f"{predicted_white.data.shape[:2]}"
        )
    shared = input_img.valid_mask() & predicted_white.valid_mask()
    n_shared = int(shared.sum())
    if n_shared == 0:
        raise InsufficientSupportError("no shared masked-in pixels")

    pred = predicted_white.data[shared]  # (N, 3)
    inp = input_img.data[shared]
    eps = RATIO_EPS_FACTOR * float(pred.max()) if pred.size else 0.0

    gains = np.empty(3, dtype=np.float64)
    for c in range(3):
        keep = pred[:, c] > eps
        n_keep = int(keep.sum())
        if n_keep == 0 or n_keep < MIN_SUPPORT_FRACTION * n_shared:
            raise InsufficientSupportError(
                f"channel {'rgb'[c]}: only {n_keep}/{n_shared} pixels survive "
                f"the epsilon filter"
            )
        ratios = inp[keep, c] / pred[keep, c]
        gains[c] = np.median(ratios) if aggregator is Aggregator.MEDIAN else np.mean(ratios)

    norm = np.linalg.norm(gains)
    if norm == 0.0:
        raise DegenerateIlluminantError("recovered gains are all zero")
    return Illuminant.from_array(gains / norm)


def angular_error(e1, e2) -> float:
    """Angle in degrees between two illuminants (or RGB vectors).

    Scale invariant and symmetric; the cosine is clamped to [-1, 1] before
    arccos so floating-point round-off cannot leave the domain.
    """
    v1 = e1.as_array() if isinstance(e1, Illuminant) else np.asarray(e1, dtype=np.float64)
    v2 = e2.as_array() if isinstance(e2, Illuminant) else np.asarray(e2, dtype=np.float64)
    for v in (v1, v2):
        if v.shape != (3,) or not np.isfinite(v).all():
            raise DegenerateIlluminantError(f"not a finite RGB triple: {v!r}")
    n1 = np.linalg.norm(v1)
    n2 = np.linalg.norm(v2)
    if n1 == 0.0 or n2 == 0.0:
        raise DegenerateIlluminantError("zero-norm vector has no direction")
    cos = np.dot(v1, v2) / (n1 * n2)
    return math.degrees(math.acos(min(1.0, max(-1.0, cos))))


def error_map(predicted_white: Image, gt_white: Image) -> np.ndarray:
    """Per-pixel angular error (degrees) between two renditions of a scene.

    Returns an (H, W) float64 raster. Pixels that are masked out in either
    image, or whose RGB vector norm falls below a relative epsilon in either
    image, are marked invalid with NaN.
    """
    if predicted_white.data.shape != gt_white.data.shape:
        raise InputDomainError(
            f"image dimensions differ: {predicted_white.data.shape[:2]} vs "
            f"{gt_white.data.shape[:2]}"
        )
    p = predicted_white.data
    g = gt_white.data
    shared = predicted_white.valid_mask() & gt_white.valid_mask()
    if not shared.any():
        return np.full(p.shape[:2], np.nan, dtype=np.float64)
    pn = np.linalg.norm(p, axis=2)
    gn = np.linalg.norm(g, axis=2)
    # eps from masked-in values only; masked-out pixels may hold garbage
    eps = RATIO_EPS_FACTOR * max(float(p[shared].max()), float(g[shared].max()))
    valid = shared & (pn >= eps) & (gn >= eps) & (pn > 0.0) & (gn > 0.0)
    cos = np.zeros_like(pn)
    np.divide(
        np.einsum("ijc,ijc->ij", p, g),
        pn * gn,
        out=cos,
        where=valid,
    )
    out = np.full(pn.shape, np.nan, dtype=np.float64)
    out[valid] = np.degrees(np.arccos(np.clip(cos[valid], -1.0, 1.0)))
    return out
