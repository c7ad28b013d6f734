"""Command line: ``statsub check <manifest|fixture> [options]``."""

from __future__ import annotations

import argparse
import os
import sys

from .manifest import FIXTURES, ManifestError, load_manifest
from .report import FORMATS, render_report
from .runner import SUITES, SelectionError, configure, run_suites

SEED_ENV = "STATSUB_SEED"


def _floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} numbers, got {len(vals)}")
    return vals


def _box(text: str) -> tuple[float, float]:
    lo, hi = _floats(text, 2)
    if not lo < hi:
        raise argparse.ArgumentTypeError("box needs lo < hi")
    return lo, hi


def _seed(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be hexadecimal, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        n = 0
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        x = 0.0
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="statsub", description="Residual checks for statistical structures and submersions.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run identity suites on a manifest or bundled fixture")
    c.add_argument("manifest", help=f"JSON manifest path or fixture name ({', '.join(FIXTURES)})")
    c.add_argument("--suites", type=lambda s: [x.strip() for x in s.split(",") if x.strip()],
                   help=f"comma-separated subset of {','.join(SUITES)}")
    c.add_argument("--points", type=_positive_int, help="number of sample points")
    c.add_argument("--box", type=_box, help="sampling box lo,hi")
    c.add_argument("--seed", type=_seed, help=f"hexadecimal seed (overrides ${SEED_ENV})")
    c.add_argument("--tol", type=_positive_float, help="tolerance for every suite")
    c.add_argument("--format", choices=FORMATS, default="text")
    c.add_argument("--point", type=_floats, help="evaluate at the single point x1,..,xm and print raw tensors")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    seed = args.seed
    if seed is None and os.environ.get(SEED_ENV):
        try:
            seed = _seed(os.environ[SEED_ENV])
        except argparse.ArgumentTypeError as e:
            print(f"statsub: {SEED_ENV}: {e}", file=sys.stderr)
            return 2
    try:
        manifest = load_manifest(args.manifest)
        manifest, sampler = configure(manifest, args.points, args.box, seed, args.tol, args.point)
        result = run_suites(manifest, args.suites, sampler, point=args.point)
    except (ManifestError, SelectionError) as e:
        print(f"statsub: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(render_report(result, args.format))
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
