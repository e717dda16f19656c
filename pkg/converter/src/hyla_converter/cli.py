"""Command-line entry point: `convert --kind ... --in ... --out ...`."""

import argparse
import json
import sys

from .convert import DEFAULT_SEED, SOURCE_KINDS, SourceSpec, convert
from .formats import ConvertError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="convert",
        description="convert an upstream dataset release into a neutral "
                    "dataset directory and print a JSON report")
    p.add_argument("--kind", required=True, choices=SOURCE_KINDS,
                   help="upstream layout")
    p.add_argument("--in", dest="input_dir", required=True, metavar="DIR",
                   help="directory holding the upstream files")
    p.add_argument("--out", dest="output_dir", required=True, metavar="DIR",
                   help="dataset directory to write")
    p.add_argument("--name", default=None,
                   help="dataset name (default: inferred from --in)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help="seed for regenerated splits (default: "
                        f"{DEFAULT_SEED})")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = SourceSpec(source_kind=args.kind, input_paths=args.input_dir,
                      output_dir=args.output_dir, name=args.name,
                      seed=args.seed)
    try:
        report = convert(spec)
    except ConvertError as e:
        print(f"convert: {e}", file=sys.stderr)
        return 1
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
