"""Scoring: per-sample angular errors, the six-number summary, evaluation
runs over test splits, run archives, and cross-dataset matrices.

A "run" scores one model (external predictions or a built-in estimator)
against one manifest's test split. Runs serialize to JSON so matrices can
be assembled later without recomputing anything.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .color import (
    Aggregator,
    ColorSpace,
    Illuminant,
    Image,
    angular_error,
    linear_to_srgb,
    recover_illuminant,
)
from .dataset import (
    Manifest,
    PredictionKind,
    PredictionSet,
    SampleRecord,
    Split,
    load_sample,
)
from .errors import (
    BridgeError,
    DegenerateIlluminantError,
    DegenerateSceneError,
    IncompleteGridError,
    InputDomainError,
    InsufficientSupportError,
    ManifestError,
)
from .estimators import PRESETS, EstimatorSpec, estimate
from .pngio import read_png16

RUN_VERSION = 1

# Error classes that mean "this one sample could not be scored", as opposed
# to a broken invocation. These are recorded per sample and excluded from
# the statistics; everything else propagates.
_PER_SAMPLE_FAILURES = (DegenerateSceneError, DegenerateIlluminantError, InsufficientSupportError)


@dataclass(frozen=True)
class ErrorStats:
    """Six-number summary of a set of angular errors, all in degrees."""

    mean: float
    median: float
    trimean: float
    best25_mean: float
    worst25_mean: float
    max: float


@dataclass(frozen=True)
class EvaluationRun:
    model_name: str
    manifest_name: str
    split_seed: int
    space: str
    per_sample: tuple[tuple[str, float], ...]
    failures: tuple[tuple[str, str], ...]
    stats: ErrorStats
    partition_stats: dict

    def errors(self) -> list[float]:
        return [e for _, e in self.per_sample]


@dataclass(frozen=True)
class CrossMatrix:
    """Grid of runs: rows are training datasets (what the model saw), cols
    are test datasets (what it was scored on)."""

    train_names: tuple[str, ...]
    test_names: tuple[str, ...]
    cells: dict


def _quartile(sorted_arr: np.ndarray, q: float) -> float:
    """Order statistic at fraction q with linear interpolation between
    neighboring ranks (position (n-1)*q)."""
    pos = (len(sorted_arr) - 1) * q
    lo = math.floor(pos)
    frac = pos - lo
    if frac == 0.0:
        return float(sorted_arr[lo])
    return float(sorted_arr[lo] + frac * (sorted_arr[lo + 1] - sorted_arr[lo]))


def summarize(errors) -> ErrorStats:
    """Reduce a non-empty list of angular errors to the six-number summary.

    mean: arithmetic mean (compensated summation, so the result does not
    depend on summation order); median: middle order statistic, average of
    the two middles for even N; trimean: (Q1 + 2*Q2 + Q3)/4 with
    linearly interpolated quartiles; best25/worst25: means of the k
    smallest/largest errors with k = max(1, round_half_up(N/4)); max.
    """
    arr = np.sort(np.asarray(errors, dtype=np.float64).reshape(-1))
    n = arr.size
    if n == 0:
        raise InputDomainError("cannot summarize an empty error list")
    if not np.all(np.isfinite(arr)) or arr[0] < 0.0:
        raise InputDomainError("angular errors must be finite and >= 0")
    k = max(1, math.floor(n / 4 + 0.5))
    return ErrorStats(
        mean=math.fsum(arr) / n,
        median=_quartile(arr, 0.5) if n % 2 else float(arr[n // 2 - 1] + arr[n // 2]) / 2.0,
        trimean=(_quartile(arr, 0.25) + 2.0 * _quartile(arr, 0.5) + _quartile(arr, 0.75)) / 4.0,
        best25_mean=math.fsum(arr[:k]) / k,
        worst25_mean=math.fsum(arr[-k:]) / k,
        max=float(arr[-1]),
    )


def _finish_run(
    model_name: str,
    manifest: Manifest,
    split: Split,
    space: str,
    results: list,
) -> EvaluationRun:
    """Assemble per-sample results (id, tag, error-or-None, reason-or-None)
    into a run with overall and per-scene-tag statistics."""
    per_sample = [(sid, err) for sid, _, err, _ in results if err is not None]
    failures = [(sid, reason) for sid, _, _, reason in results if reason is not None]
    if not per_sample:
        raise InsufficientSupportError(
            f"all {len(results)} test samples failed; nothing to summarize"
        )
    stats = summarize([e for _, e in per_sample])
    partition = {}
    for tag in sorted({tag for _, tag, err, _ in results if err is not None}):
        partition[tag] = summarize([e for _, t, e, _ in results if e is not None and t == tag])
    return EvaluationRun(
        model_name=model_name,
        manifest_name=manifest.name,
        split_seed=split.seed,
        space=space,
        per_sample=tuple(per_sample),
        failures=tuple(failures),
        stats=stats,
        partition_stats=partition,
    )


def _map_samples(fn, records, jobs: int) -> list:
    if jobs <= 1:
        return [fn(rec) for rec in records]
    # scheduling only; map() preserves input order, so aggregation and
    # reports are identical for any worker count
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, records))


def evaluate(
    manifest: Manifest,
    split: Split,
    predictions: PredictionSet,
    space: str = "linear",
    jobs: int = 1,
) -> EvaluationRun:
    """Score external predictions against the test split of a manifest.

    WHITE_BALANCED_IMAGE predictions are compared in linear space: the
    input sample is loaded (decoded to linear per its encoding tag), the
    predicted image is read from its 16-bit linear PNG, the illuminant is
    recovered from the pair and scored against the ground truth.
    ILLUMINANT_TRIPLE predictions are scored directly. `space` is recorded
    as run metadata (which space the model consumed upstream); recovery
    itself always happens on linear values.

    Samples where recovery has insufficient support are excluded from the
    statistics but kept on the run's failure list; they are never silently
    dropped.
    """
    if space not in ("linear", "srgb"):
        raise InputDomainError(f"space must be 'linear' or 'srgb', got {space!r}")

    def score(rec: SampleRecord):
        entry = predictions.entries[rec.id]
        if predictions.kind is PredictionKind.ILLUMINANT_TRIPLE:
            return rec.id, rec.scene_tag.value, angular_error(entry, rec.gt_illuminant), None
        input_img = load_sample(rec)
        pred_img = read_png16(entry)
        try:
            e_est = recover_illuminant(input_img, pred_img, Aggregator.MEDIAN)
        except _PER_SAMPLE_FAILURES as e:
            return rec.id, rec.scene_tag.value, None, str(e)
        except InputDomainError as e:
            raise BridgeError(f"prediction for {rec.id!r}: {e}") from None
        return rec.id, rec.scene_tag.value, angular_error(e_est, rec.gt_illuminant), None

    results = _map_samples(score, split.test_samples(manifest), jobs)
    return _finish_run(predictions.model_name, manifest, split, space, results)


def _resolve_model_name(spec: EstimatorSpec) -> str:
    for name, preset in PRESETS.items():
        if preset == spec:
            return name
    sigma = f"{spec.sigma:g}"
    return f"grey_edge_n{spec.deriv_order}_p{spec.norm_p:g}_s{sigma}"


def evaluate_estimator(
    manifest: Manifest,
    split: Split,
    spec: EstimatorSpec,
    space: str = "linear",
    jobs: int = 1,
    model_name: str | None = None,
) -> EvaluationRun:
    """Run one estimator over the test split and score it.

    space='linear' estimates on the loaded linear values. space='srgb'
    estimates on gamma-encoded values instead (values clipped to [0, 1]
    first, since the encoding is only defined there); ground truth stays
    the same, so the run measures how the estimator behaves when fed
    display-encoded data. Degenerate scenes are recorded as failures.

    Explicit parameters that coincide with a named preset report under the
    preset's name, so the two invocations produce identical runs.
    """
    if space not in ("linear", "srgb"):
        raise InputDomainError(f"space must be 'linear' or 'srgb', got {space!r}")
    name = model_name or _resolve_model_name(spec)

    def score(rec: SampleRecord):
        img = load_sample(rec)
        if space == "srgb":
            encoded = linear_to_srgb(np.clip(img.data, 0.0, 1.0))
            img = Image(encoded, img.mask, ColorSpace.LINEAR)
        try:
            e_est = estimate(img, spec)
        except _PER_SAMPLE_FAILURES as e:
            return rec.id, rec.scene_tag.value, None, str(e)
        return rec.id, rec.scene_tag.value, angular_error(e_est, rec.gt_illuminant), None

    results = _map_samples(score, split.test_samples(manifest), jobs)
    return _finish_run(name, manifest, split, space, results)


def cross_evaluate(runs) -> CrossMatrix:
    """Assemble archived runs into a train x test matrix.

    The run's model_name identifies the training dataset (by convention the
    model is named for what it was trained on) and manifest_name the test
    dataset. Every (train, test) pair must be present exactly once; a
    missing pair raises IncompleteGridError naming it.
    """
    runs = list(runs)
    if not runs:
        raise InputDomainError("no runs to assemble")
    cells = {}
    for run in runs:
        key = (run.model_name, run.manifest_name)
        if key in cells:
            raise InputDomainError(f"duplicate run for train={key[0]!r}, test={key[1]!r}")
        cells[key] = run.stats
    trains = tuple(sorted({t for t, _ in cells}))
    tests = tuple(sorted({s for _, s in cells}))
    for t in trains:
        for s in tests:
            if (t, s) not in cells:
                raise IncompleteGridError(f"missing run for train={t!r}, test={s!r}")
    return CrossMatrix(trains, tests, cells)


def run_to_dict(run: EvaluationRun) -> dict:
    return {
        "version": RUN_VERSION,
        "model_name": run.model_name,
        "manifest_name": run.manifest_name,
        "split_seed": run.split_seed,
        "space": run.space,
        "per_sample": [[sid, err] for sid, err in run.per_sample],
        "failures": [[sid, reason] for sid, reason in run.failures],
        "stats": asdict(run.stats),
        "partition_stats": {tag: asdict(s) for tag, s in run.partition_stats.items()},
    }


def save_run(run: EvaluationRun, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(run_to_dict(run), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _stats_from_dict(doc: dict, context: str) -> ErrorStats:
    try:
        return ErrorStats(**{k: float(doc[k]) for k in ErrorStats.__dataclass_fields__})
    except (KeyError, TypeError, ValueError) as e:
        raise ManifestError(f"{context}: malformed stats block ({e})") from None


def load_run(path: str | os.PathLike) -> EvaluationRun:
    """Load an archived run and verify its stats against its own samples.

    The stored summary must match a fresh summarize() of the stored
    per-sample errors; an archive that disagrees with itself is rejected.
    """
    path = os.fspath(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ManifestError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(doc, dict) or doc.get("version") != RUN_VERSION:
        raise ManifestError(f"{path}: not a version-{RUN_VERSION} run archive")
    try:
        per_sample = tuple((str(sid), float(err)) for sid, err in doc["per_sample"])
        failures = tuple((str(sid), str(reason)) for sid, reason in doc.get("failures", []))
        run = EvaluationRun(
            model_name=str(doc["model_name"]),
            manifest_name=str(doc["manifest_name"]),
            split_seed=int(doc["split_seed"]),
            space=str(doc["space"]),
            per_sample=per_sample,
            failures=failures,
            stats=_stats_from_dict(doc["stats"], path),
            partition_stats={
                str(tag): _stats_from_dict(s, path)
                for tag, s in doc.get("partition_stats", {}).items()
            },
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ManifestError(f"{path}: malformed run archive ({e})") from None
    if not run.per_sample:
        raise ManifestError(f"{path}: run archive has no per-sample errors")
    recomputed = summarize(run.errors())
    for field_name in ErrorStats.__dataclass_fields__:
        stored = getattr(run.stats, field_name)
        fresh = getattr(recomputed, field_name)
        if not math.isclose(stored, fresh, rel_tol=1e-9, abs_tol=1e-9):
            raise ManifestError(
                f"{path}: stored {field_name}={stored!r} does not match the "
                f"per-sample errors (recomputed {fresh!r})"
            )
    return run
