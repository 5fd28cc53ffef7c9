"""Gap between optimized discrete and continuous energies for one potential,
printed as a table of N, gap and gap * N^(1 + delta/d)."""
import argparse

from georiesz.config import GapScanConfig
from georiesz.experiments import run_gap_scan


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--delta", type=float, default=-1.0)
    p.add_argument("--log", action="store_true")
    p.add_argument("--Ns", type=int, nargs="+", default=[64, 128, 256, 512, 1024, 2048, 4096])
    p.add_argument("--iterations", type=int, default=15)
    p.add_argument("--out", default=None)
    args = p.parse_args()
    cfg = GapScanConfig(d=2, delta=args.delta, log=args.log, Ns=tuple(args.Ns), iterations=args.iterations)
    rep = run_gap_scan(cfg, out=args.out)
    power = 1.0 if args.log else 1 + args.delta / 2
    print(f"{'N':>6} {'gap':>14} {'scaled':>12}")
    for c in rep.cells:
        if c.get("gap") is not None:
            print(f"{c['N']:>6} {c['gap']:>14.6e} {c['gap'] * c['N'] ** power:>12.5f}")
    print(rep.summary())


if __name__ == "__main__":
    main()
