"""Shared helpers for the trainer tests.

Datasets come from the benchmark CLI (the only sanctioned channel to the
benchmark package), get built once per test process in a cached temp
directory, and are reused by every module that needs them. The trained
multi-domain model is cached the same way because it costs around a
minute of CPU.
"""

from __future__ import annotations

import functools
import json
import os
import subprocess
import tempfile

import torch

import ccgan

CAST_ILLUMINANT = (0.75, 1.0, 0.55)
WARM_ILLUMINANT = (1.0, 0.75, 0.45)

_RECIPES = {
    # fine-grained achromatic scenes under one fixed cast; the workhorse
    "cast200": dict(patch_count=150, illuminant=CAST_ILLUMINANT,
                    noise_sigma=0.005, seed=777, count=200),
    # already-canonical coarse scenes for the paired identity run
    "identity100": dict(patch_count=8, illuminant=(1.0, 1.0, 1.0),
                        noise_sigma=0.0, seed=555, count=100),
    # a handful of samples for mechanics tests that only need plumbing
    "tiny24": dict(patch_count=150, illuminant=CAST_ILLUMINANT,
                   noise_sigma=0.005, seed=31, count=24),
}


@functools.lru_cache(maxsize=1)
def _work_root() -> str:
    return tempfile.mkdtemp(prefix="ccgan_tests_")


def run_ccbench(*args: str) -> subprocess.CompletedProcess:
    proc = subprocess.run(["ccbench", *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"ccbench {' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return proc


@functools.lru_cache(maxsize=None)
def dataset(kind: str) -> str:
    """Build (once) and return the manifest path for a named recipe."""
    recipe = _RECIPES[kind]
    out = os.path.join(_work_root(), kind)
    cfg_path = os.path.join(_work_root(), f"{kind}.json")
    with open(cfg_path, "w", encoding="utf-8") as fh:
        json.dump({
            "width": 64, "height": 64,
            "patch_count": recipe["patch_count"],
            "albedo_distribution": "achromatic_mean",
            "illuminants": [list(recipe["illuminant"])],
            "noise_sigma": recipe["noise_sigma"],
            "seed": recipe["seed"],
        }, fh)
    run_ccbench("synth", "--config", cfg_path, "--count", str(recipe["count"]), "--out", out)
    return os.path.join(out, "manifest.json")


def evaluate_bridge(manifest: str, bridge_dir: str, out_dir: str,
                    split_seed: int = 0) -> dict:
    """Score a bridge through the benchmark CLI and parse the run archive."""
    run_ccbench("evaluate", "--manifest", manifest, "--predictions", bridge_dir,
                "--split-seed", str(split_seed), "--out", out_dir)
    archives = sorted(f for f in os.listdir(out_dir)
                      if f.startswith("run__") and f.endswith(".json"))
    assert archives, f"no run archive written under {out_dir}"
    with open(os.path.join(out_dir, archives[-1]), "r", encoding="utf-8") as fh:
        return json.load(fh)


def star_config(**overrides) -> ccgan.GanConfig:
    raw = {
        "architecture": "stargan", "epochs": 30, "batch_size": 4,
        "learning_rate": 2e-4, "seed": 11,
        "domains": [
            {"name": "canonical", "illuminant": [1.0, 1.0, 1.0]},
            {"name": "warm", "illuminant": list(WARM_ILLUMINANT)},
        ],
    }
    raw.update(overrides)
    return ccgan.config_from_dict(raw)


@functools.lru_cache(maxsize=1)
def trained_stargan() -> ccgan.TrainedModel:
    """One 30-epoch multi-domain model, shared by every test that needs it."""
    return ccgan.train(star_config(), dataset("cast200"))


def work_dir(name: str) -> str:
    path = os.path.join(_work_root(), name)
    os.makedirs(path, exist_ok=True)
    return path


class AnalyticRelight(torch.nn.Module):
    """Oracle stub generator: treat the input as already canonical and
    apply the target domain's illuminant analytically.

    Its illumination estimate is the same (wrong) one for every domain, so
    a consistency check over its outputs must produce identical stats rows.
    """

    def __init__(self, domain_illuminants):
        super().__init__()
        self.register_buffer("ills", torch.tensor(domain_illuminants, dtype=torch.float32))

    @staticmethod
    def _decode(x):
        return torch.where(x <= 0.04045, x / 12.92, ((x + 0.055) / 1.055) ** 2.4)

    @staticmethod
    def _encode(x):
        return torch.where(x <= 0.0031308, 12.92 * x, 1.055 * x ** (1 / 2.4) - 0.055)

    def forward(self, x, onehot):
        linear = self._decode((x + 1.0) / 2.0)
        e = (onehot @ self.ills)[:, :, None, None]
        return self._encode(torch.clamp(linear * e, 0.0, 1.0)) * 2.0 - 1.0
