"""Report rendering: Markdown tables for humans, CSV for machines, and
per-pixel error-map PNGs.

Markdown prints degree values to one decimal. CSV keeps full float
precision (repr) so a parsed CSV reproduces the run's statistics exactly;
parse_csv_run is the matching reader.
"""

from __future__ import annotations

import os
from enum import Enum

import numpy as np

from .color import Image, error_map
from .errors import InputDomainError
from .evaluate import CrossMatrix, ErrorStats, EvaluationRun
from .pngio import write_png8

_STAT_FIELDS = ("mean", "median", "trimean", "best25_mean", "worst25_mean", "max")
_MD_HEADER = "| Mean | Med. | Tri. | Best 25% | Worst 25% | Max |"

# Error-map color scale. Errors are clamped to [0, 30] degrees and mapped
# through these stops (cool blue at 0 up to red at the clamp); pixels that
# cannot be scored render neutral gray.
ERROR_MAP_MAX_DEG = 30.0
_STOPS = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
_STOP_COLORS = np.array(
    [[20, 20, 160], [0, 150, 255], [0, 220, 120], [255, 230, 0], [230, 30, 30]],
    dtype=np.float64,
)
INVALID_GRAY = (128, 128, 128)


class ReportFormat(str, Enum):
    MARKDOWN = "markdown"
    CSV = "csv"


def _stat_cells(stats: ErrorStats) -> str:
    return " | ".join(f"{getattr(stats, f):.1f}" for f in _STAT_FIELDS)


def _run_markdown(run: EvaluationRun) -> str:
    lines = [
        "| Model " + _MD_HEADER,
        "| --- | --- | --- | --- | --- | --- | --- |",
        f"| {run.model_name} | {_stat_cells(run.stats)} |",
    ]
    for tag in sorted(run.partition_stats):
        lines.append(f"| {run.model_name} ({tag}) | {_stat_cells(run.partition_stats[tag])} |")
    if run.failures:
        lines.append("")
        lines.append(
            f"{len(run.failures)} sample(s) failed and are excluded from the stats: "
            + "; ".join(f"{sid} ({reason})" for sid, reason in run.failures)
        )
    return "\n".join(lines) + "\n"


def _matrix_markdown(matrix: CrossMatrix) -> str:
    lines = [
        "| Train/Test " + _MD_HEADER,
        "| --- | --- | --- | --- | --- | --- | --- |",
    ]
    for train in matrix.train_names:
        for test in matrix.test_names:
            lines.append(f"| {train}/{test} | {_stat_cells(matrix.cells[(train, test)])} |")
    return "\n".join(lines) + "\n"


def _run_csv(run: EvaluationRun) -> str:
    lines = ["id,angular_error_deg"]
    lines += [f"{sid},{err!r}" for sid, err in run.per_sample]
    lines.append("")
    lines.append("stat,value")
    lines += [f"{f},{getattr(run.stats, f)!r}" for f in _STAT_FIELDS]
    lines.append(f"n_samples,{len(run.per_sample)}")
    lines.append(f"n_failures,{len(run.failures)}")
    lines += [f"failed_id,{sid}" for sid, _ in run.failures]
    return "\n".join(lines) + "\n"


def _matrix_csv(matrix: CrossMatrix) -> str:
    lines = ["train,test," + ",".join(_STAT_FIELDS)]
    for train in matrix.train_names:
        for test in matrix.test_names:
            stats = matrix.cells[(train, test)]
            cells = ",".join(repr(getattr(stats, f)) for f in _STAT_FIELDS)
            lines.append(f"{train},{test},{cells}")
    return "\n".join(lines) + "\n"


def render_report(obj, fmt: ReportFormat = ReportFormat.MARKDOWN) -> str:
    """Render a run or a cross matrix to text. Deterministic: the same
    input yields byte-identical output."""
    fmt = ReportFormat(fmt)
    if isinstance(obj, EvaluationRun):
        return _run_markdown(obj) if fmt is ReportFormat.MARKDOWN else _run_csv(obj)
    if isinstance(obj, CrossMatrix):
        return _matrix_markdown(obj) if fmt is ReportFormat.MARKDOWN else _matrix_csv(obj)
    raise InputDomainError(f"cannot render a {type(obj).__name__}")


def parse_csv_run(text: str) -> tuple[list, ErrorStats, int]:
    """Parse render_report(run, CSV) back into (per_sample, stats, n_failures)."""
    lines = text.splitlines()
    if not lines or lines[0] != "id,angular_error_deg":
        raise InputDomainError("not a run CSV: missing header")
    per_sample = []
    i = 1
    while i < len(lines) and lines[i] != "":
        sid, _, err = lines[i].partition(",")
        per_sample.append((sid, float(err)))
        i += 1
    footer = {}
    n_failures = 0
    for line in lines[i + 1 :]:
        key, _, value = line.partition(",")
        if key in _STAT_FIELDS:
            footer[key] = float(value)
        elif key == "n_failures":
            n_failures = int(value)
    if set(footer) != set(_STAT_FIELDS):
        raise InputDomainError("not a run CSV: incomplete stats footer")
    return per_sample, ErrorStats(**footer), n_failures


def colorize_errors(errors_deg: np.ndarray) -> np.ndarray:
    """Map an (H, W) array of angular errors (degrees, NaN = invalid) to an
    (H, W, 3) uint8 raster on the fixed 0-30 degree scale."""
    arr = np.asarray(errors_deg, dtype=np.float64)
    if arr.ndim != 2:
        raise InputDomainError(f"error raster must be (H, W), got {arr.shape}")
    t = np.clip(arr / ERROR_MAP_MAX_DEG, 0.0, 1.0)
    valid = np.isfinite(t)
    out = np.empty(arr.shape + (3,), dtype=np.uint8)
    out[~valid] = INVALID_GRAY
    tv = t[valid]
    for c in range(3):
        out[..., c][valid] = np.rint(np.interp(tv, _STOPS, _STOP_COLORS[:, c])).astype(np.uint8)
    return out


def write_error_map(predicted: Image, gt_white: Image, out_path: str | os.PathLike) -> np.ndarray:
    """Render the per-pixel angular error between two renditions of a scene
    to a heatmap PNG. Returns the raw error raster (degrees, NaN invalid)."""
    errors = error_map(predicted, gt_white)
    write_png8(out_path, colorize_errors(errors))
    return errors
