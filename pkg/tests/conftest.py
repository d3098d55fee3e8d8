import json
import os

import numpy as np
import pytest

import ccbench as cb
from ccbench.pngio import write_png16

FIXTURE_ILLUMINANT = cb.Illuminant(0.8, 1.0, 0.6)


@pytest.fixture(scope="session")
def achromatic_dataset(tmp_path_factory):
    """Noiseless ACHROMATIC_MEAN dataset: grey-world's precondition holds
    exactly, so its error on this data is quantization-level."""
    root = tmp_path_factory.mktemp("ach")
    cfg = cb.SynthConfig(
        128, 128, 60, cb.AlbedoDistribution.ACHROMATIC_MEAN,
        (FIXTURE_ILLUMINANT,), seed=5,
    )
    manifest = cb.emit_dataset(cfg, 20, root)
    return manifest, cb.split_manifest(manifest, 0), root


@pytest.fixture(scope="session")
def white_patch_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("wp")
    cfg = cb.SynthConfig(
        128, 128, 60, cb.AlbedoDistribution.UNIFORM_RGB,
        (FIXTURE_ILLUMINANT,), include_white_patch=True, seed=6,
    )
    manifest = cb.emit_dataset(cfg, 20, root)
    return manifest, cb.split_manifest(manifest, 0), root


def write_bridge(bridge_dir, manifest, split, model_name, make_prediction):
    """Write a WHITE_BALANCED_IMAGE bridge; make_prediction(record) returns
    the linear prediction Image for one test sample."""
    os.makedirs(bridge_dir, exist_ok=True)
    entries = {}
    for rec in split.test_samples(manifest):
        pred = make_prediction(rec)
        data = pred.data
        peak = float(data.max())
        if peak > 1.0:
            data = data / peak
        write_png16(os.path.join(bridge_dir, f"{rec.id}.png"), cb.Image(data))
        entries[rec.id] = f"{rec.id}.png"
    doc = {"model_name": model_name, "kind": "white_balanced_image", "entries": entries}
    with open(os.path.join(bridge_dir, "predictions.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
    return bridge_dir


@pytest.fixture(scope="session")
def oracle_bridge(achromatic_dataset, tmp_path_factory):
    """Predictions that are the exact ground-truth correction of each input."""
    manifest, split, _ = achromatic_dataset
    bridge = tmp_path_factory.mktemp("oracle_bridge")

    def perfect(rec):
        return cb.correct_von_kries(cb.load_sample(rec), rec.gt_illuminant)

    return write_bridge(bridge, manifest, split, "oracle", perfect)


def random_linear_image(rng, h=24, w=32, lo=0.05, hi=1.0):
    return cb.Image(rng.uniform(lo, hi, (h, w, 3)))
