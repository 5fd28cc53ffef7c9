"""georiesz command line.

    georiesz <command> [--config PATH|-] [--out DIR] [--seed U64] [--workers N] [--quiet]

Exit status: 0 pass, 1 quantitative failure, 2 usage or configuration error.
"""
import argparse
import sys

from . import __version__
from .config import SCHEMAS, ConfigError, load
from .errors import DomainError
from .experiments import RUNNERS

HELP = {
    "coeffs": "Gegenbauer coefficient table and sign verdict",
    "gap-scan": "energy gap exponent from optimized point sets",
    "extremizers": "energy ordering of uniform and alternative measures",
    "stolarsky": "invariance-principle residuals against truncation bounds",
    "cap": "cap-discrepancy slope for a generator on S^2",
    "decay": "log-log decay slope of the coefficients",
    "optimize": "projected-gradient energy optimization",
    "gen": "write a point set",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser():
    p = _Parser(prog="georiesz", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SCHEMAS:
        s = sub.add_parser(name, help=HELP[name])
        s.add_argument("--config", metavar="PATH", help="JSON configuration file, '-' for stdin")
        s.add_argument("--out", metavar="DIR", help="directory for CSV/JSON/text outputs")
        s.add_argument("--seed", type=int, default=0, help="base seed (cell seeds are seed XOR index)")
        s.add_argument("--workers", type=int, default=1, help="worker processes for grid cells")
        s.add_argument("--quiet", action="store_true", help="print nothing on success")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("georiesz: error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    if args.workers < 1:
        print("georiesz: error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        cfg = load(args.command, args.config)
        report = RUNNERS[args.command](cfg, out=args.out, seed=args.seed, workers=args.workers)
    except (ConfigError, DomainError) as exc:
        print(f"georiesz {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(report.summary())
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
