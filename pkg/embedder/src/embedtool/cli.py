"""CLI: `embed --images <dir> --model <path> --name <matcher> --size 112 --out <path.bemb>`.

Exit codes: 0 on full success, 1 when the job fails or any image was
skipped, 2 on IO errors.
"""

from __future__ import annotations

import argparse
import sys

from .core import EmbedError, EmbedJob, embed_directory


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed",
        description="Embed a directory of pre-cropped face images into a BEMB store.",
    )
    parser.add_argument("--images", required=True, help="directory of face images")
    parser.add_argument("--model", required=True, help="TorchScript embedding model")
    parser.add_argument("--name", required=True, help="matcher name recorded in the store")
    parser.add_argument("--size", type=int, default=112, help="model input size (square)")
    parser.add_argument("--out", required=True, help="output .bemb path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    job = EmbedJob(
        image_dir=args.images,
        model_path=args.model,
        matcher_name=args.name,
        output_path=args.out,
        input_size=args.size,
    )
    try:
        result = embed_directory(job)
    except EmbedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.count} embeddings (dimension {result.dimension}) to {args.out}")
    if result.failures:
        for name, reason in result.failures:
            print(f"skipped {name}: {reason}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
