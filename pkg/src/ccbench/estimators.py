"""Classical illuminant estimators as one parametric family.

Every estimator here instantiates the same rule: smooth the image with a
Gaussian of scale sigma, take the spatial derivative of order n (0 = the
values themselves), and reduce the absolute responses per channel with a
Minkowski p-mean. The resulting triple, normalized to unit length, is the
illuminant estimate.

    n=0, p=1            grey-world        (scene average is achromatic)
    n=0, p=inf          white-patch       (brightest response is white)
    n=0, p=6            shades-of-grey
    n=0, p=13, sigma=2  general grey-world
    n=1, p=7, sigma=4   first-order grey-edge
    n=2, p=7, sigma=5   second-order grey-edge

Raising p shifts weight toward the strongest responses; p=inf is the exact
channel maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .color import ColorSpace, Illuminant, Image
from .errors import DegenerateSceneError, InputDomainError


@dataclass(frozen=True)
class EstimatorSpec:
    """A point (n, p, sigma) in the estimator family.

    deriv_order: spatial derivative order, 0, 1 or 2.
    norm_p: Minkowski exponent, >= 1; math.inf selects the maximum.
    sigma: Gaussian pre-smoothing scale in pixels, >= 0 (0 = no smoothing).
    """

    deriv_order: int
    norm_p: float
    sigma: float = 0.0

    def __post_init__(self):
        if self.deriv_order not in (0, 1, 2):
            raise InputDomainError(f"derivative order must be 0, 1 or 2, got {self.deriv_order}")
        if not (self.norm_p >= 1.0):  # NaN fails this too
            raise InputDomainError(f"Minkowski exponent must be >= 1, got {self.norm_p}")
        if not (self.sigma >= 0.0) or math.isinf(self.sigma):
            raise InputDomainError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.deriv_order >= 1 and self.sigma <= 0.0:
            raise InputDomainError("derivative estimators need sigma > 0 for smoothing support")


GREY_WORLD = EstimatorSpec(0, 1.0, 0.0)
WHITE_PATCH = EstimatorSpec(0, math.inf, 0.0)
SHADES_OF_GREY = EstimatorSpec(0, 6.0, 0.0)
GENERAL_GREY_WORLD = EstimatorSpec(0, 13.0, 2.0)
GREY_EDGE_1 = EstimatorSpec(1, 7.0, 4.0)
GREY_EDGE_2 = EstimatorSpec(2, 7.0, 5.0)

PRESETS: dict[str, EstimatorSpec] = {
    "grey_world": GREY_WORLD,
    "white_patch": WHITE_PATCH,
    "shades_of_grey": SHADES_OF_GREY,
    "general_grey_world": GENERAL_GREY_WORLD,
    "grey_edge_1": GREY_EDGE_1,
    "grey_edge_2": GREY_EDGE_2,
}


# Smoothing kernel support: truncated at 3 sigma, reflecting boundaries.
_TRUNCATE_SIGMAS = 3.0


def gaussian_smooth(img: Image, sigma: float) -> Image:
    """Separable Gaussian smoothing of a linear image; sigma = 0 is the
    identity. The kernel is truncated at 3 sigma with reflect boundary
    handling. The mask passes through untouched (no dilation); it is the
    statistics downstream that exclude masked pixels.
    """
    if not (sigma >= 0.0) or math.isinf(sigma):
        raise InputDomainError(f"sigma must be finite and >= 0, got {sigma}")
    if img.space is not ColorSpace.LINEAR:
        raise InputDomainError("gaussian_smooth operates on LINEAR-tagged images")
    if sigma == 0.0:
        return img
    out = np.stack(
        [_smooth(img.data[:, :, c], sigma) for c in range(3)],
        axis=2,
    )
    return Image(out, img.mask, ColorSpace.LINEAR)


def _smooth(channel: np.ndarray, sigma: float) -> np.ndarray:
    return gaussian_filter(channel, sigma, mode="reflect", truncate=_TRUNCATE_SIGMAS)


def _fill_masked(data: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Replace masked-out pixels with the per-channel masked-in mean.

    Smoothing and differentiation are neighborhood operations; a flat fill
    keeps masked-out content from bleeding a signal of its own into the
    masked-in statistics (a constant has zero derivative, and under n=0
    the fill value is never read).
    """
    out = data.copy()
    means = data[mask].mean(axis=0)
    out[~mask] = means
    return out


def _response(channel: np.ndarray, spec: EstimatorSpec) -> np.ndarray:
    """|D^n (G_sigma * channel)| for one channel."""
    smoothed = _smooth(channel, spec.sigma) if spec.sigma > 0.0 else channel
    if spec.deriv_order == 0:
        return np.abs(smoothed)
    gy, gx = np.gradient(smoothed)
    if spec.deriv_order == 1:
        return np.hypot(gx, gy)
    gyy, _ = np.gradient(gy)
    _, gxx = np.gradient(gx)
    return np.hypot(gxx, gyy)


def estimate(img: Image, spec: EstimatorSpec) -> Illuminant:
    """Run one member of the estimator family on a linear image.

    Statistics are taken over masked-in pixels only. Returns the unit-norm
    illuminant estimate; raises DegenerateSceneError when every channel
    response is zero (e.g. an all-black image, or a constant image under a
    derivative estimator).
    """
    if img.space is not ColorSpace.LINEAR:
        raise InputDomainError("estimators operate on LINEAR-tagged images")
    mask = img.valid_mask()
    if not mask.any():
        raise DegenerateSceneError("no masked-in pixels to estimate from")

    data = img.data if img.mask is None else _fill_masked(img.data, mask)
    e = np.empty(3, dtype=np.float64)
    for c in range(3):
        resp = _response(data[:, :, c], spec)[mask]
        if math.isinf(spec.norm_p):
            e[c] = resp.max()
        else:
            # factor out the peak so resp**p cannot overflow at large p
            peak = resp.max()
            if peak == 0.0:
                e[c] = 0.0
            else:
                scaled = resp / peak
                e[c] = peak * np.power(np.mean(np.power(scaled, spec.norm_p)), 1.0 / spec.norm_p)

    norm = np.linalg.norm(e)
    # a zero channel response is a scene problem too: Illuminant components
    # must be strictly positive (they end up as divisors)
    if norm == 0.0 or e.min() <= 0.0 or not np.all(np.isfinite(e)):
        raise DegenerateSceneError(
            f"estimator (n={spec.deriv_order}, p={spec.norm_p}, sigma={spec.sigma}) "
            f"produced no usable response on this scene"
        )
    return Illuminant.from_array(e / norm)


def estimate_preset(img: Image, name: str) -> Illuminant:
    """estimate() with a named preset from PRESETS."""
    try:
        spec = PRESETS[name]
    except KeyError:
        raise InputDomainError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    return estimate(img, spec)
