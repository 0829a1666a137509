"""The ``forge`` command line.

Subcommands: ``catalog validate``, ``generate``, ``caption``, ``prompt``,
``stats``, ``fixtures``. Exit codes: 0 success, 1 usage error, 2 validation
failure, 3 generation abort. FORGE_WORKERS sets the default worker count;
FORGE_BACKEND selects the raster kernel (numba/numpy/auto).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import CatalogError, load_catalog, validate_catalog
from .config import ConfigError, load_config
from .grammar import GrammarError, build_paraphrase_prompt, CaptionDoc
from .metadata import MetadataError
from .pipeline import (
    GenerationAbort,
    dataset_stats,
    default_workers,
    generate_dataset,
    recaption,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_ABORT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="forge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="catalog operations")
    cat_sub = cat.add_subparsers(dest="catalog_command", required=True)
    cat_validate = cat_sub.add_parser("validate", help="validate a catalog file")
    cat_validate.add_argument("catalog", type=Path)

    gen = sub.add_parser("generate", help="generate a dataset")
    gen.add_argument("--config", type=Path, required=True)
    gen.add_argument("--catalog", type=Path, required=True)
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--seed", type=int, default=None, help="override config seed")
    gen.add_argument("--videos", type=int, default=None, help="override n_videos")
    gen.add_argument("--workers", type=int, default=None)

    cap = sub.add_parser("caption", help="compose a caption from stored metadata")
    cap.add_argument("--metadata", type=Path, required=True)
    cap.add_argument("--mode", choices=["full", "sampled"], default=None)
    cap.add_argument("--seed", type=int, default=None)

    prompt = sub.add_parser("prompt", help="build the paraphrase prompt for a caption")
    prompt.add_argument("--caption", type=Path, required=True,
                        help="text file holding the caption")

    stats = sub.add_parser("stats", help="tally a generated dataset")
    stats.add_argument("--manifest", type=Path, required=True)
    stats.add_argument("--format", choices=["text", "json"], default="text")

    fixtures = sub.add_parser("fixtures", help="export SVCW cross-check fixtures")
    fixtures.add_argument("--out", type=Path, required=True)
    fixtures.add_argument("--seed", type=int, default=2024)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (CatalogError, ConfigError, MetadataError, GrammarError) as exc:
        print(f"forge: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GenerationAbort as exc:
        print(f"forge: generation aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except (FileNotFoundError, PermissionError) as exc:
        print(f"forge: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    if args.command == "catalog":
        catalog = load_catalog(args.catalog)
        report = validate_catalog(catalog)
        print(report)
        return EXIT_OK if report.ok else EXIT_VALIDATION

    if args.command == "generate":
        import hashlib

        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
            config.__post_init__()
        if args.videos is not None:
            config.n_videos = args.videos
            config.__post_init__()
        catalog = load_catalog(args.catalog)
        config_digest = hashlib.sha256(args.config.read_bytes()).hexdigest()
        manifest = generate_dataset(
            config,
            catalog,
            args.out,
            workers=args.workers or default_workers(),
            config_digest=config_digest,
        )
        counts = manifest.header["counts"]
        print(
            f"wrote {counts['samples']} samples from {counts['videos']} videos to {args.out}"
            + (
                f" ({manifest.header['failed_videos']} videos failed placement)"
                if manifest.header["failed_videos"]
                else ""
            )
        )
        return EXIT_OK

    if args.command == "caption":
        doc = recaption(args.metadata, mode=args.mode, seed=args.seed)
        print(doc.full_text)
        return EXIT_OK

    if args.command == "prompt":
        text = args.caption.read_text("utf-8").strip()
        doc = CaptionDoc(statements=(), full_text=text)
        prompt = build_paraphrase_prompt(doc)
        print(json.dumps({"prompt": prompt.text, "max_new_tokens": prompt.max_new_tokens}))
        return EXIT_OK

    if args.command == "stats":
        report = dataset_stats(args.manifest)
        if args.format == "json":
            print(json.dumps(report.to_json_dict(), indent=1, sort_keys=True))
        else:
            print(report.to_text())
        return EXIT_OK

    if args.command == "fixtures":
        from .svcw import export_fixtures

        index = export_fixtures(args.out, seed=args.seed)
        print(f"wrote fixtures index {index}")
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
