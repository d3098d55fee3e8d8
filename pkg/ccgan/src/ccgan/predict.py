"""Inference: run a trained generator over a manifest's test split and
write the results as an image-kind prediction bridge."""

from __future__ import annotations

import numpy as np
import torch

from .config import Architecture
from .data import (load_manifest, load_sample_image, resize, split_ids,
                   srgb_decode, srgb_encode, to_tensor, from_tensor, write_bridge)
from .errors import DataError
from .train import TrainedModel


def _domain_index(model: TrainedModel, target_domain: str | None) -> torch.Tensor | None:
    if model.architecture is not Architecture.STARGAN:
        if target_domain is not None:
            raise DataError(
                f"{model.architecture.value} maps a single fixed direction; "
                "target_domain only applies to stargan")
        return None
    if target_domain is None:
        raise DataError(
            f"stargan needs a target_domain; this model knows {list(model.domain_names)}")
    try:
        idx = model.domain_names.index(target_domain)
    except ValueError:
        raise DataError(
            f"unknown domain {target_domain!r}; this model knows "
            f"{list(model.domain_names)}") from None
    onehot = torch.zeros(1, len(model.domain_names))
    onehot[0, idx] = 1.0
    return onehot


def generate(model: TrainedModel, img_linear: np.ndarray,
             target_domain: str | None = None) -> np.ndarray:
    """Map one linear [0, 1] image through the generator.

    The network runs at its training resolution on gamma-encoded values;
    the result is resized back to the input shape and returned linear.
    """
    onehot = _domain_index(model, target_domain)
    h, w = img_linear.shape[:2]
    x = to_tensor(srgb_encode(resize(img_linear, model.config.image_size)))[None]
    with torch.no_grad():
        y = model.generator(x, onehot) if onehot is not None else model.generator(x)
    out = srgb_decode(from_tensor(y[0]))
    if out.shape[:2] != (h, w):
        import cv2
        out = cv2.resize(out, (w, h), interpolation=cv2.INTER_LINEAR)
    return np.clip(out.astype(np.float32), 0.0, 1.0)


def predict(model: TrainedModel, manifest_path: str, out_dir: str,
            target_domain: str | None = None, model_name: str | None = None) -> str:
    """Write bridge predictions covering the manifest's test split exactly.

    The split is recomputed here with the seed and ratio stored in the
    model's config, so the bridge lines up with an evaluation run that
    uses the same split seed.
    """
    _domain_index(model, target_domain)  # validate before any file work
    dataset = load_manifest(manifest_path)
    _, test_ids = split_ids([s.id for s in dataset.samples],
                            model.config.split_seed, model.config.split_ratio)
    if not test_ids:
        raise DataError("the test split is empty; nothing to predict")

    images = {}
    for sid in test_ids:
        sample = dataset.by_id(sid)
        images[sid] = generate(model, load_sample_image(sample), target_domain)

    name = model_name or model.architecture.value
    if target_domain is not None:
        name = f"{name}_{target_domain}"
    return write_bridge(out_dir, name, images)
