"""Cross-domain consistency scoring for multi-domain models.

A multi-domain generator claims one illumination estimate per input no
matter which target domain it renders: dividing the domain's output by
that domain's illuminant should always land on the same white-balanced
image. This module makes that claim measurable. For every named domain it
re-corrects the predictions back to canonical, ships them over the file
bridge, and lets the benchmark CLI score them against ground truth. A
consistent model produces near-identical stats rows for every domain.
"""

from __future__ import annotations

import glob
import json
import os
import subprocess
from dataclasses import dataclass

import numpy as np

from .config import Architecture
from .data import load_manifest, load_sample_image, split_ids, write_bridge
from .errors import DataError
from .predict import generate
from .train import TrainedModel

STAT_KEYS = ("mean", "median", "trimean", "best25_mean", "worst25_mean", "max")


@dataclass(frozen=True)
class DomainResult:
    domain: str
    stats: dict[str, float]
    scored: int
    failures: int


def _run_benchmark(manifest_path: str, bridge_dir: str, split_seed: int,
                   out_dir: str, command: str) -> dict:
    """Invoke the benchmark evaluator and parse the run archive it wrote."""
    argv = [command, "evaluate",
            "--manifest", manifest_path,
            "--predictions", bridge_dir,
            "--split-seed", str(split_seed),
            "--out", out_dir]
    proc = subprocess.run(argv, capture_output=True, text=True)
    if proc.returncode != 0:
        raise DataError(
            f"'{' '.join(argv)}' exited {proc.returncode}: {proc.stderr.strip()}")
    archives = sorted(glob.glob(os.path.join(out_dir, "run__*.json")))
    if not archives:
        raise DataError(f"the evaluator wrote no run archive under {out_dir}")
    with open(archives[-1], "r", encoding="utf-8") as fh:
        return json.load(fh)


def consistency_check(model: TrainedModel, manifest_path: str, work_dir: str,
                      command: str = "ccbench") -> list[DomainResult]:
    """Score every named domain's re-corrected predictions against gt.

    Writes one bridge directory and one evaluation directory per domain
    under ``work_dir`` and leaves them in place for inspection.
    """
    if model.architecture is not Architecture.STARGAN:
        raise DataError("consistency_check needs a multi-domain (stargan) model")

    dataset = load_manifest(manifest_path)
    _, test_ids = split_ids([s.id for s in dataset.samples],
                            model.config.split_seed, model.config.split_ratio)
    if not test_ids:
        raise DataError("the test split is empty; nothing to check")

    results = []
    for dom in model.config.domains:
        e = np.asarray(dom.illuminant, dtype=np.float32).reshape(1, 1, 3)
        images = {}
        for sid in test_ids:
            pred = generate(model, load_sample_image(dataset.by_id(sid)), dom.name)
            # undo the domain's cast; scale is irrelevant to the scorer but
            # the bridge files must stay within [0, 1]
            corrected = pred / e
            peak = float(corrected.max())
            if peak > 1.0:
                corrected = corrected / peak
            images[sid] = np.clip(corrected, 0.0, 1.0)

        bridge = write_bridge(os.path.join(work_dir, f"bridge_{dom.name}"),
                              f"consistency_{dom.name}", images)
        run = _run_benchmark(manifest_path, bridge, model.config.split_seed,
                             os.path.join(work_dir, f"eval_{dom.name}"), command)
        stats = {k: float(run["stats"][k]) for k in STAT_KEYS}
        results.append(DomainResult(domain=dom.name, stats=stats,
                                    scored=len(run.get("per_sample", [])),
                                    failures=len(run.get("failures", []))))
    return results


def render_consistency_table(results: list[DomainResult]) -> str:
    """Six-column stats table with one row per domain, degrees to one decimal."""
    lines = ["| Domain | Mean | Med. | Tri. | Best 25% | Worst 25% | Max |",
             "| --- | --- | --- | --- | --- | --- | --- |"]
    for r in results:
        cells = " | ".join(f"{r.stats[k]:.1f}" for k in STAT_KEYS)
        lines.append(f"| {r.domain} | {cells} |")
    return "\n".join(lines) + "\n"
