"""vlharness command line: init-model, train, average-eval, verify-fixtures."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .average import average_and_eval
from .fixtures import verify_kernel_fixtures
from .model import init_checkpoint
from .train import TrainConfig, finetune


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="vlharness", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    init = sub.add_parser("init-model", help="write the source model checkpoint")
    init.add_argument("--out", type=Path, required=True)
    init.add_argument("--seed", type=int, default=0)
    init.add_argument("--pretrain-manifest", type=Path, default=None,
                      help="contrastively pretrain on this manifest first")
    init.add_argument("--pretrain-steps", type=int, default=150)

    train = sub.add_parser("train", help="fine-tune adapters on a generated manifest")
    train.add_argument("--manifest", type=Path, required=True)
    train.add_argument("--model", type=Path, required=True)
    train.add_argument("--out", type=Path, required=True)
    train.add_argument("--rank", type=int, default=16)
    train.add_argument("--lr", type=float, default=5e-7)
    train.add_argument("--epochs", type=int, default=1)
    train.add_argument("--batch-size", type=int, default=32)
    train.add_argument("--max-steps", type=int, default=None)
    train.add_argument("--max-pairs", type=int, default=2000)
    train.add_argument("--stylize", action="store_true")
    train.add_argument("--augment", action="store_true")
    train.add_argument("--seed", type=int, default=0)

    avg = sub.add_parser("average-eval", help="interpolate checkpoints and probe retrieval")
    avg.add_argument("--src", type=Path, required=True)
    avg.add_argument("--ft", type=Path, required=True)
    avg.add_argument("--manifest", type=Path, required=True)
    avg.add_argument("--alphas", type=float, nargs="+", default=[0.0, 0.5, 1.0])

    verify = sub.add_parser("verify-fixtures", help="cross-check SVCW fixtures")
    verify.add_argument("--dir", type=Path, required=True)

    args = parser.parse_args(argv)

    if args.command == "init-model":
        if args.pretrain_manifest is not None:
            from .train import pretrain_checkpoint

            path = pretrain_checkpoint(
                args.out, args.pretrain_manifest, steps=args.pretrain_steps, seed=args.seed
            )
        else:
            path = init_checkpoint(args.out, seed=args.seed)
        print(f"wrote source checkpoint {path}")
        return 0

    if args.command == "train":
        cfg = TrainConfig(
            manifest_path=str(args.manifest),
            model_path=str(args.model),
            out_path=str(args.out),
            lora_rank=args.rank,
            learning_rate=args.lr,
            epochs=args.epochs,
            batch_size=args.batch_size,
            max_steps=args.max_steps,
            max_pairs=args.max_pairs,
            stylize=args.stylize,
            augment=args.augment,
            seed=args.seed,
        )
        result = finetune(cfg)
        print(
            f"trained {len(result.log)} steps: loss {result.first_loss:.4f} -> "
            f"{result.final_loss:.4f}; {result.trainable_parameters} trainable params; "
            f"checkpoint {result.checkpoint_path}"
        )
        return 0

    if args.command == "average-eval":
        report = average_and_eval(args.src, args.ft, args.manifest, tuple(args.alphas))
        print(json.dumps({str(k): v for k, v in report.scores.items()}, indent=1))
        return 0

    if args.command == "verify-fixtures":
        report = verify_kernel_fixtures(args.dir)
        print(report.summary())
        return 0 if report.ok else 1

    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
