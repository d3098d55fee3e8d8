"""Command line front end: train, predict, consistency.

Exit codes: 0 success, 2 bad config or data, 3 file-system trouble,
4 training divergence.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import load_config
from .consistency import consistency_check, render_consistency_table
from .errors import ConfigError, DataError, TrainingDiverged
from .predict import predict
from .train import load_model, save_model, train


def cmd_train(args) -> int:
    overrides = {
        "epochs": args.epochs,
        "seed": args.seed,
        "batch_size": args.batch_size,
        "learning_rate": args.learning_rate,
        "split_seed": args.split_seed,
    }
    cfg = load_config(args.config, overrides)
    parent = os.path.dirname(os.path.abspath(args.out))
    if not os.path.isdir(parent):
        # fail before training, not after the epochs are already spent
        raise FileNotFoundError(f"output directory {parent} does not exist")
    model = train(cfg, args.manifest)
    for epoch, row in enumerate(model.log):
        parts = "  ".join(f"{k}={v:.4f}" for k, v in row.items())
        print(f"epoch {epoch + 1}/{cfg.epochs}  {parts}")
    save_model(model, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    out = predict(model, args.manifest, args.out, target_domain=args.target)
    print(out)
    return 0


def cmd_consistency(args) -> int:
    model = load_model(args.model)
    results = consistency_check(model, args.manifest, args.out, command=args.command)
    sys.stdout.write(render_consistency_table(results))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccgan",
        description="Toy-scale image-to-image GAN trainers for color constancy.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model on a manifest's training split")
    p.add_argument("--config", required=True, help="YAML or JSON training config")
    p.add_argument("--manifest", required=True, help="dataset manifest JSON")
    p.add_argument("--out", default="model.pt", help="checkpoint path (default model.pt)")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--split-seed", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="write bridge predictions for the test split")
    p.add_argument("--model", required=True, help="checkpoint from 'ccgan train'")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="bridge directory to create")
    p.add_argument("--target", default=None, help="target domain (multi-domain models)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("consistency",
                       help="score each domain's re-corrected predictions side by side")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="work directory for bridges and runs")
    p.add_argument("--command", default="ccbench",
                   help="benchmark CLI to invoke (default ccbench)")
    p.set_defaults(func=cmd_consistency)

    return parser


def entry(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrainingDiverged as e:
        return _fail(e, 4)
    except (ConfigError, DataError) as e:
        return _fail(e, 2)
    except OSError as e:
        return _fail(e, 3)


def _fail(e: Exception, code: int) -> int:
    print(f"error: {e}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(entry())
