"""Squared L2 cap discrepancy of Fibonacci and random point sets on S^2."""
import argparse

import numpy as np

from georiesz.discrepancy import cap_discrepancy
from georiesz.pointsets import generate
from georiesz.specfun import SphereContext


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--Ns", type=int, nargs="+", default=[64, 128, 256, 512, 1024, 2048, 4096])
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    ctx = SphereContext(2)
    for kind in ("fibonacci", "random_uniform"):
        D2 = [cap_discrepancy(generate(kind, N, ctx, args.seed), ctx, "euclidean_oracle").value for N in args.Ns]
        slope = np.polyfit(np.log(args.Ns), np.log(D2), 1)[0]
        print(f"{kind}: slope {slope:.4f}")
        for N, v in zip(args.Ns, D2):
            print(f"  {N:>6} {v:.6e}")


if __name__ == "__main__":
    main()
