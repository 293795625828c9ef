"""Command-line entry point: ``sdnlw-figures --manifest FILE --out DIR``."""

from __future__ import annotations

import argparse
import sys

from .manifest import ManifestError, load_manifest
from .render import render_all

EXIT_OK = 0
EXIT_RENDER = 1
EXIT_MANIFEST = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdnlw-figures",
        description="Render study figures from a plot-data manifest and its CSV files.",
    )
    parser.add_argument("--manifest", required=True, help="path to manifest.json")
    parser.add_argument("--out", required=True, help="output directory for SVG files")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        figures = load_manifest(args.manifest)
    except ManifestError as exc:
        print(f"sdnlw-figures: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    written, errors = render_all(figures, args.out)
    for path in written:
        print(path)
    for message in errors:
        print(f"sdnlw-figures: {message}", file=sys.stderr)
    return EXIT_RENDER if errors else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
