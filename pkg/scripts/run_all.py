"""Run every experiment at its acceptance configuration and write reports to
``--out`` (one sub-directory per experiment)."""
import argparse
import os

from georiesz.config import SCHEMAS, from_dict
from georiesz.experiments import RUNNERS

PLAN = [
    ("coeffs", {"d": 2, "delta": 0.5, "K": 64}),
    ("coeffs", {"d": 3, "delta": -2.0, "K": 64}),
    ("decay", {"d": 2, "delta": 0.5}),
    ("decay", {"d": 2, "delta": -1.0}),
    ("decay", {"d": 3, "delta": 0.5}),
    ("stolarsky", {}),
    ("extremizers", {"delta": 0.5}),
    ("extremizers", {"delta": 1.0}),
    ("extremizers", {"delta": 2.0}),
    ("extremizers", {"delta": -1.0}),
    ("cap", {}),
    ("gap-scan", {"delta": -1.0, "exponent_tol": 0.1}),
    ("gap-scan", {"delta": 0.5}),
    ("gap-scan", {"log": True}),
]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip-gap", action="store_true", help="skip the O(N^2) gap scans")
    args = p.parse_args()
    failed = 0
    for i, (cmd, raw) in enumerate(PLAN):
        if args.skip_gap and cmd == "gap-scan":
            continue
        cfg = from_dict(SCHEMAS[cmd], raw)
        tag = "_".join(f"{k}={v}" for k, v in raw.items()) or "default"
        rep = RUNNERS[cmd](cfg, out=os.path.join(args.out, f"{i:02d}_{cmd}_{tag}"), seed=args.seed)
        print(rep.summary(), flush=True)
        failed += not rep.passed
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
