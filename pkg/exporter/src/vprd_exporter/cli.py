"""Command line entry point.

Exit codes: 0 success, 2 bad invocation, 3 unusable corpus data,
4 model failure or unexpected error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import CorpusError, ModelError
from .export import ExportJob, export_descriptors
from .model import DEFAULT_SEED

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vprd-export",
        description="Export deep fc-layer image descriptors to a VPRD file",
    )
    parser.add_argument("--version", action="version", version=f"vprd-export {__version__}")
    parser.add_argument("--corpus", required=True, help="directory of images")
    parser.add_argument("--model", default="alexnet")
    parser.add_argument("--layer", default="fc6")
    parser.add_argument("--out", required=True, help="output .vprd path")
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument(
        "--weights", default="seeded",
        help="'pretrained', 'seeded', or a state-dict file path (default seeded)",
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="init seed for --weights seeded")
    parser.add_argument("--on-error", choices=("abort", "skip"), default="abort",
                        help="what to do with undecodable images")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = ExportJob(
            corpus=args.corpus,
            model=args.model,
            layer=args.layer,
            out=args.out,
            batch=args.batch,
            weights=args.weights,
            seed=args.seed,
            on_error=args.on_error,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        out = export_descriptors(job)
    except ModelError as exc:
        # Unknown model/layer names are spelling problems; weight trouble is not.
        message = str(exc)
        print(f"error: {message}", file=sys.stderr)
        if message.startswith(("unknown model", "model ")):
            return EXIT_CONFIG
        return EXIT_INTERNAL
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
