"""Print the first Gegenbauer coefficients of geodesic Riesz potentials with
their predicted signs, for a quick look at the sign pattern."""
import argparse

from georiesz.coefficients import coefficient_table, predicted_sign
from georiesz.potential import PotentialSpec
from georiesz.specfun import SphereContext


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--deltas", type=float, nargs="+", default=[0.5, -0.5, -1.0])
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--K", type=int, default=12)
    args = p.parse_args()
    ctx = SphereContext(args.d)
    for delta in args.deltas:
        spec = PotentialSpec.geodesic(delta, args.eps)
        table = coefficient_table(spec, ctx, args.K)
        print(spec.describe())
        for n, v in enumerate(table.values):
            print(f"  {n:>3} {v:+.12e}  predicted {predicted_sign(spec, n, ctx):+d}")


if __name__ == "__main__":
    main()
