"""Dataset access through the ccbench file formats.

This package never imports the benchmark library. Everything it needs is
specified by the on-disk contracts: the manifest JSON, the 16-bit linear
PNG encoding, the id-hash train/test split, and the prediction bridge
directory. Those are reimplemented here against their documentation so the
two packages stay decoupled.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass

import cv2
import numpy as np
import torch

from .errors import DataError

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class Sample:
    id: str
    image_path: str
    gt_illuminant: np.ndarray  # (3,) float64, all positive
    mask_path: str | None
    encoding: str  # "linear16" or "srgb8"


@dataclass(frozen=True)
class Dataset:
    name: str
    samples: tuple[Sample, ...]

    def by_id(self, sample_id: str) -> Sample:
        for s in self.samples:
            if s.id == sample_id:
                return s
        raise KeyError(sample_id)


def load_manifest(path: str) -> Dataset:
    """Parse a manifest.json; image paths are resolved against its directory."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc

    if not isinstance(raw, dict) or raw.get("version") != MANIFEST_VERSION:
        raise DataError(f"{path}: expected a version {MANIFEST_VERSION} manifest")
    name = raw.get("name")
    entries = raw.get("samples")
    if not isinstance(name, str) or not isinstance(entries, list) or not entries:
        raise DataError(f"{path}: manifest needs a name and a non-empty sample list")

    base = os.path.dirname(os.path.abspath(path))
    samples = []
    seen: set[str] = set()
    for entry in entries:
        if not isinstance(entry, dict):
            raise DataError(f"{path}: sample entries must be objects")
        sid = entry.get("id")
        img = entry.get("image_path")
        gt = entry.get("gt_illuminant")
        if not isinstance(sid, str) or not isinstance(img, str):
            raise DataError(f"{path}: every sample needs a string id and image_path")
        if sid in seen:
            raise DataError(f"{path}: duplicate sample id {sid!r}")
        seen.add(sid)
        e = np.asarray(gt, dtype=np.float64)
        if e.shape != (3,) or not np.all(np.isfinite(e)) or not np.all(e > 0):
            raise DataError(f"{path}: sample {sid}: gt_illuminant must be 3 positive numbers")
        enc = entry.get("encoding")
        if enc not in ("linear16", "srgb8"):
            raise DataError(f"{path}: sample {sid}: unknown encoding {enc!r}")
        mask = entry.get("mask_path")
        samples.append(Sample(
            id=sid,
            image_path=os.path.join(base, img),
            gt_illuminant=e,
            mask_path=os.path.join(base, mask) if isinstance(mask, str) else None,
            encoding=enc,
        ))
    return Dataset(name=name, samples=tuple(samples))


def split_ids(ids: list[str], seed: int, ratio: float = 0.8) -> tuple[list[str], list[str]]:
    """The benchmark's deterministic split, reproduced from its definition.

    Sort ids by (sha256 hex digest of "{seed}:{id}", id); the first
    round-half-up(ratio * N) are train, the rest test.
    """
    if len(set(ids)) != len(ids):
        raise DataError("split input contains duplicate ids")
    keyed = sorted(ids, key=lambda i: (hashlib.sha256(f"{seed}:{i}".encode()).hexdigest(), i))
    n_train = int(math.floor(ratio * len(ids) + 0.5))
    return keyed[:n_train], keyed[n_train:]


# ---------------------------------------------------------------- image I/O

def read_image(path: str) -> np.ndarray:
    """Load a 16-bit linear PNG as float32 HxWx3 in [0, 1]."""
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DataError(f"cannot read image {path}")
    if raw.dtype != np.uint16 or raw.ndim != 3 or raw.shape[2] != 3:
        raise DataError(f"{path}: expected a 3-channel 16-bit PNG, got {raw.dtype} {raw.shape}")
    return (raw[:, :, ::-1].astype(np.float32) / 65535.0)


def load_sample_image(sample: Sample) -> np.ndarray:
    """Read a manifest sample as linear float32, honoring its encoding tag."""
    if sample.encoding == "linear16":
        return read_image(sample.image_path)
    raw = cv2.imread(sample.image_path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DataError(f"cannot read image {sample.image_path}")
    if raw.dtype != np.uint8 or raw.ndim != 3 or raw.shape[2] != 3:
        raise DataError(f"{sample.image_path}: encoding srgb8 expects a 3-channel 8-bit PNG")
    return srgb_decode(raw[:, :, ::-1].astype(np.float32) / 255.0).astype(np.float32)


def write_image(path: str, img: np.ndarray) -> None:
    """Store linear [0, 1] float data as a 16-bit PNG."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DataError("image must be HxWx3")
    if not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 1.0 + 1e-9:
        raise DataError("image values must be finite and within [0, 1]")
    raw = np.clip(np.rint(arr * 65535.0), 0, 65535).astype(np.uint16)
    if not cv2.imwrite(path, raw[:, :, ::-1]):
        raise DataError(f"cannot write image {path}")


# sRGB transfer curve (IEC 61966-2-1). The networks train on gamma-encoded
# values so the optimizer sees perceptually even steps; files stay linear.

def srgb_encode(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return np.where(x <= 0.0031308, 12.92 * x, 1.055 * np.power(x, 1.0 / 2.4) - 0.055)


def srgb_decode(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return np.where(x <= 0.04045, x / 12.92, np.power((x + 0.055) / 1.055, 2.4))


# ------------------------------------------------------------ tensor bridge

def to_tensor(img01: np.ndarray) -> torch.Tensor:
    """HxWx3 in [0, 1] -> 3xHxW tensor in [-1, 1] (the tanh range)."""
    t = torch.from_numpy(np.ascontiguousarray(img01.transpose(2, 0, 1))).float()
    return t * 2.0 - 1.0

def from_tensor(t: torch.Tensor) -> np.ndarray:
    arr = t.detach().cpu().numpy().transpose(1, 2, 0).astype(np.float32)
    return np.clip((arr + 1.0) / 2.0, 0.0, 1.0)


def resize(img: np.ndarray, size: int) -> np.ndarray:
    if img.shape[0] == size and img.shape[1] == size:
        return img
    interp = cv2.INTER_AREA if img.shape[0] > size else cv2.INTER_LINEAR
    return cv2.resize(img, (size, size), interpolation=interp)


# --------------------------------------------------------- training arrays

def white_balanced(observed: np.ndarray, gt: np.ndarray) -> np.ndarray:
    """Divide the cast out of an observed image and renormalize into [0, 1].

    The ground-truth illuminant is only meaningful up to scale, so after the
    per-channel division the result is peak-normalized if it overflows.
    """
    canon = observed / np.asarray(gt, dtype=np.float32).reshape(1, 1, 3)
    peak = float(canon.max())
    if peak > 1.0:
        canon = canon / peak
    return np.clip(canon, 0.0, 1.0)


def load_training_tensors(dataset: Dataset, ids: list[str], size: int,
                          ) -> tuple[torch.Tensor, torch.Tensor]:
    """Stack (observed, white-balanced) sRGB tensor pairs for a list of ids."""
    xs, ys = [], []
    for sid in ids:
        sample = dataset.by_id(sid)
        obs = resize(load_sample_image(sample), size)
        can = white_balanced(obs, sample.gt_illuminant)
        xs.append(to_tensor(srgb_encode(obs)))
        ys.append(to_tensor(srgb_encode(can)))
    return torch.stack(xs), torch.stack(ys)


def batch_indices(n: int, batch_size: int, rng: np.random.Generator) -> list[np.ndarray]:
    """One epoch of shuffled batches; a short tail batch is kept, not dropped."""
    order = rng.permutation(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]


# -------------------------------------------------------------- bridge out

def write_bridge(out_dir: str, model_name: str, images: dict[str, np.ndarray]) -> str:
    """Write an image-kind prediction bridge: PNGs plus predictions.json.

    The scorer demands exactly one prediction per test id, so the caller
    passes the full mapping and this function records it verbatim.
    """
    os.makedirs(out_dir, exist_ok=True)
    entries = {}
    for sid, img in sorted(images.items()):
        fname = f"{sid}.png"
        write_image(os.path.join(out_dir, fname), img)
        entries[sid] = fname
    payload = {"model_name": model_name, "kind": "white_balanced_image", "entries": entries}
    with open(os.path.join(out_dir, "predictions.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out_dir
