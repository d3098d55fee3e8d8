"""Command-line entry point.

Subcommands wire the library into the common workflows: synthesize a
dataset, score a built-in estimator, score external predictions delivered
through the bridge, assemble archived runs into a cross-dataset matrix,
and render per-pixel error maps.

stdout carries the human-readable table (or the produced file's path);
machine-readable CSV and run-archive JSON go to files under --out, which
defaults to $CCBENCH_OUT or the working directory.

Exit codes are stable API:
    0  success
    2  usage, configuration or validation problem
    3  I/O failure (missing files, unwritable output)
    4  prediction-bridge validation failure
    5  incomplete cross-evaluation grid
"""

from __future__ import annotations

import argparse
import glob
import os
import re
import sys
from dataclasses import replace

from .color import Illuminant, correct_von_kries
from .dataset import MANIFEST_FILENAME, load_manifest, load_predictions, split_manifest
from .errors import BridgeError, CCBenchError, IncompleteGridError, InputDomainError
from .estimators import PRESETS, EstimatorSpec
from .evaluate import cross_evaluate, evaluate, evaluate_estimator, load_run, save_run
from .pngio import read_png16
from .report import ReportFormat, render_report, write_error_map
from .synth import emit_dataset, load_synth_config

OUT_ENV_VAR = "CCBENCH_OUT"


def _default_out() -> str:
    return os.environ.get(OUT_ENV_VAR, ".")


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_") or "unnamed"


def _common_flags(with_out: bool = True) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="default split seed / synth seed override")
    common.add_argument("--space", choices=["linear", "srgb"], default="linear",
                        help="color space the evaluation is tagged with")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker threads for per-sample scoring (results are identical for any value)")
    if with_out:
        common.add_argument("--out", default=None,
                            help=f"output directory (default ${OUT_ENV_VAR} or .)")
    return common


def _out_dir(args) -> str:
    out = args.out if args.out is not None else _default_out()
    os.makedirs(out, exist_ok=True)
    return out


def _split_seed(args) -> int:
    if getattr(args, "split_seed", None) is not None:
        return args.split_seed
    return args.seed if args.seed is not None else 0


def _check_jobs(args) -> None:
    if args.jobs < 1:
        raise InputDomainError(f"--jobs must be >= 1, got {args.jobs}")


def _emit_run(run, out: str) -> None:
    stem = f"{_slug(run.model_name)}__{_slug(run.manifest_name)}__{run.space}"
    csv_path = os.path.join(out, f"{stem}.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(render_report(run, ReportFormat.CSV))
    json_path = os.path.join(out, f"run__{stem}.json")
    save_run(run, json_path)
    sys.stdout.write(render_report(run, ReportFormat.MARKDOWN))
    print(f"wrote {csv_path}", file=sys.stderr)
    print(f"wrote {json_path}", file=sys.stderr)


def cmd_synth(args) -> int:
    cfg = load_synth_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out = _out_dir(args)
    emit_dataset(cfg, args.count, out)
    print(os.path.join(out, MANIFEST_FILENAME))
    return 0


def cmd_estimate(args) -> int:
    _check_jobs(args)
    explicit = [v is not None for v in (args.n, args.p, args.sigma)]
    if args.preset and any(explicit):
        raise InputDomainError("give either --preset or explicit --n/--p/--sigma, not both")
    if args.preset:
        spec = PRESETS[args.preset]
    elif args.n is not None and args.p is not None:
        spec = EstimatorSpec(args.n, args.p, args.sigma if args.sigma is not None else 0.0)
    else:
        raise InputDomainError(
            f"need --preset (one of {', '.join(sorted(PRESETS))}) or --n and --p"
        )
    manifest = load_manifest(args.manifest)
    split = split_manifest(manifest, _split_seed(args))
    run = evaluate_estimator(manifest, split, spec, space=args.space, jobs=args.jobs)
    _emit_run(run, _out_dir(args))
    return 0


def cmd_evaluate(args) -> int:
    _check_jobs(args)
    manifest = load_manifest(args.manifest)
    split = split_manifest(manifest, _split_seed(args))
    predictions = load_predictions(args.predictions, manifest, split)
    run = evaluate(manifest, split, predictions, space=args.space, jobs=args.jobs)
    _emit_run(run, _out_dir(args))
    return 0


def cmd_cross(args) -> int:
    paths = sorted(glob.glob(args.runs))
    if not paths:
        raise InputDomainError(f"no run archives match {args.runs!r}")
    matrix = cross_evaluate(load_run(p) for p in paths)
    sys.stdout.write(render_report(matrix, ReportFormat.MARKDOWN))
    return 0


def cmd_error_map(args) -> int:
    parts = args.gt_illuminant.split(",")
    if len(parts) != 3:
        raise InputDomainError(f"--gt-illuminant expects R,G,B, got {args.gt_illuminant!r}")
    try:
        gt = Illuminant.from_array([float(x) for x in parts])
    except ValueError:
        raise InputDomainError(f"--gt-illuminant components must be numbers: {args.gt_illuminant!r}") from None
    input_img = read_png16(args.input)
    predicted = read_png16(args.prediction)
    gt_white = correct_von_kries(input_img, gt)
    write_error_map(predicted, gt_white, args.out)
    print(args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccbench",
        description="Color constancy benchmarking: synthetic datasets, "
        "classical estimators, angular-error evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[_common_flags()],
                       help="generate a synthetic dataset from a config file")
    p.add_argument("--config", required=True, help="synth config JSON")
    p.add_argument("--count", type=int, required=True, help="number of samples")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("estimate", parents=[_common_flags()],
                       help="score a built-in estimator on a manifest's test split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--n", type=int, default=None, help="derivative order (0, 1, 2)")
    p.add_argument("--p", type=float, default=None, help="Minkowski exponent (inf allowed)")
    p.add_argument("--sigma", type=float, default=None, help="Gaussian smoothing scale")
    p.add_argument("--split-seed", type=int, default=None)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("evaluate", parents=[_common_flags()],
                       help="score bridge predictions on a manifest's test split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--predictions", required=True,
                   help="bridge directory (or its predictions.json)")
    p.add_argument("--split-seed", type=int, default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cross", parents=[_common_flags()],
                       help="assemble archived runs into a train/test matrix")
    p.add_argument("--runs", required=True, help="glob pattern of run JSON archives")
    p.set_defaults(func=cmd_cross)

    p = sub.add_parser("error-map", parents=[_common_flags(with_out=False)],
                       help="render a per-pixel angular error heatmap")
    p.add_argument("--input", required=True, help="observed input image (PNG)")
    p.add_argument("--prediction", required=True, help="predicted white-balanced image (PNG)")
    p.add_argument("--gt-illuminant", required=True, help="ground truth as R,G,B")
    p.add_argument("--out", required=True, help="output heatmap PNG path")
    p.set_defaults(func=cmd_error_map)

    return parser


def entry(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BridgeError as e:
        return _fail(e, 4)
    except IncompleteGridError as e:
        return _fail(e, 5)
    except CCBenchError as e:
        return _fail(e, 2)
    except OSError as e:
        return _fail(e, 3)


def _fail(e: Exception, code: int) -> int:
    print(f"error: {e}", file=sys.stderr)
    return code
