"""PNG input/output. 16-bit files carry linear radiometric data (65535 maps
to 1.0), 8-bit files carry sRGB-encoded data or masks. OpenCV does the codec
work; files on disk are BGR-ordered, arrays in memory are RGB.

Failures to read or write surface as OSError so callers can separate I/O
trouble from data validation trouble.
"""

from __future__ import annotations

import os

import cv2
import numpy as np

from .color import ColorSpace, Image, _sanitize_masked_out
from .errors import InputDomainError

PNG_MAX16 = 65535

_PNG_SIG = b"\x89PNG\r\n\x1a\n"


def png_header(path: str | os.PathLike) -> tuple[int, int, int]:
    """Return (width, height, bit_depth) from a PNG's IHDR without decoding."""
    with open(path, "rb") as fh:
        head = fh.read(26)
    if len(head) < 26 or head[:8] != _PNG_SIG or head[12:16] != b"IHDR":
        raise OSError(f"not a PNG file: {path}")
    width = int.from_bytes(head[16:20], "big")
    height = int.from_bytes(head[20:24], "big")
    return width, height, head[24]


def read_png_raw(path: str | os.PathLike) -> tuple[np.ndarray, int]:
    """Read a PNG as an (H, W, 3) RGB integer array plus its bit depth.

    Grayscale files are replicated to three channels; an alpha channel is
    dropped. Sub-8-bit files come back expanded to 8 bits (codec behavior).
    """
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        if not os.path.exists(path):
            raise FileNotFoundError(f"no such image file: {path}")
        raise OSError(f"cannot decode image: {path}")
    depth = 16 if raw.dtype == np.uint16 else 8
    if raw.ndim == 2:
        raw = np.repeat(raw[:, :, None], 3, axis=2)
    if raw.shape[2] == 4:
        raw = raw[:, :, :3]
    return raw[:, :, ::-1], depth


def read_png16(path: str | os.PathLike) -> Image:
    """Read a PNG as a linear image scaled to [0, 1] by its bit depth.

    The written format is 16-bit; 8-bit files are accepted and scaled by
    255 instead so round trips preserve range either way.
    """
    raw, depth = read_png_raw(path)
    data = raw.astype(np.float64) / float((1 << depth) - 1)
    return Image(data, None, ColorSpace.LINEAR)


def write_png16(path: str | os.PathLike, img: Image) -> None:
    """Write a linear image as 16-bit RGB PNG. Values must lie in [0, 1].

    Masked-out pixels (whose values carry no meaning and may be garbage)
    are written as zeros.
    """
    if img.space is not ColorSpace.LINEAR:
        raise InputDomainError("write_png16 stores linear data only")
    data = _sanitize_masked_out(img)
    if float(data.max(initial=0.0)) > 1.0:
        raise InputDomainError(
            "image values exceed 1.0; rescale before writing (1.0 maps to "
            "the top code 65535)"
        )
    q = np.rint(np.clip(data, 0.0, 1.0) * PNG_MAX16).astype(np.uint16)
    _imwrite(path, q[:, :, ::-1])


def write_png8(path: str | os.PathLike, rgb: np.ndarray) -> None:
    """Write an (H, W, 3) uint8 RGB array (rendered maps, previews)."""
    arr = np.asarray(rgb)
    if arr.dtype != np.uint8 or arr.ndim != 3 or arr.shape[2] != 3:
        raise InputDomainError(f"write_png8 needs (H, W, 3) uint8, got {arr.dtype} {arr.shape}")
    _imwrite(path, arr[:, :, ::-1])


def read_mask(path: str | os.PathLike) -> np.ndarray:
    """Read a mask PNG to a boolean (H, W) array; nonzero means masked-in."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        if not os.path.exists(path):
            raise FileNotFoundError(f"no such mask file: {path}")
        raise OSError(f"cannot decode mask: {path}")
    if raw.ndim == 3:
        return raw.any(axis=2)
    return raw > 0


def write_mask(path: str | os.PathLike, mask: np.ndarray) -> None:
    """Write a boolean (H, W) mask as 8-bit grayscale PNG (255 = in)."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise InputDomainError(f"mask must be (H, W), got {mask.shape}")
    _imwrite(path, mask.astype(np.uint8) * 255)


def _imwrite(path, array) -> None:
    try:
        ok = cv2.imwrite(str(path), array)
    except cv2.error as e:
        raise OSError(f"failed to write {path}: {e}") from None
    if not ok:
        raise OSError(f"failed to write {path}")
