"""Command-line entry: embed-export --dataset ... --output ..."""

from __future__ import annotations

import argparse
import sys

from .export import ExportConfig, ExportError, export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Export pooled transformer hidden states as the "
                    "embedding file consumed by the contour pipeline.")
    parser.add_argument("--dataset", required=True)
    parser.add_argument("--format", choices=["essays-csv", "mbti-csv"],
                        default="essays-csv")
    parser.add_argument("--output", required=True)
    parser.add_argument("--model", default="bert-base-uncased")
    parser.add_argument("--layer", type=int, default=None,
                        help="1-based transformer block (default: 11 for "
                             "essays-csv, 12 for mbti-csv)")
    parser.add_argument("--pooling", choices=["mean-over-real-tokens",
                                              "first-token"],
                        default="mean-over-real-tokens")
    parser.add_argument("--max-tokens", type=int, default=512)
    parser.add_argument("--batch-size", type=int, default=8)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    layer = args.layer
    if layer is None:
        layer = 12 if args.format == "mbti-csv" else 11
    try:
        cfg = ExportConfig(model=args.model, layer=layer, pooling=args.pooling,
                           max_tokens=args.max_tokens, batch_size=args.batch_size,
                           dataset=args.dataset, dataset_format=args.format,
                           output=args.output)
        path = export(cfg)
    except (ExportError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
