"""Command line entry point: ``coindex verify <config>``."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .verify import EXIT_HYPOTHESIS, render_json, render_text, run_verification


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coindex",
                                description="Residue and index checks for coincident map pairs.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="verify the index identities for a configured family")
    v.add_argument("config", help="JSON configuration file")
    v.add_argument("--order", type=int, default=None, help="truncation order K")
    v.add_argument("--mode", choices=("exact", "float"), default=None)
    v.add_argument("--report", choices=("json", "text"), default="json")
    v.add_argument("--calibrate", action="store_true",
                   help="recompute the matrix-argument signs instead of using the stored ones")
    v.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error (ConfigError): {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    if args.order is not None and args.order < 2:
        print("error: --order must be at least 2", file=sys.stderr)
        return EXIT_HYPOTHESIS
    out = run_verification(cfg, order=args.order, mode=args.mode, calibrate=args.calibrate,
                           timing=args.timing)
    render = render_json if args.report == "json" else render_text
    sys.stdout.write(render(out.report))
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
