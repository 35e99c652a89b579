#!/usr/bin/env python3
"""Adaptive-projection sweep plus net-size bound tables.

    python scripts/reduction_probe.py --trials 200 --seed 1
"""

import argparse
import sys

from riskbench.cli import main as cli_main
from riskbench.reduction import net_size_bound


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", default="runs/reduce.jsonl")
    args = parser.parse_args()

    code = cli_main(["reduce", "--trials", str(args.trials),
                     "--seed", str(args.seed), "--out", args.out])
    if code != 0:
        return code

    print("\nlog net-size bounds (constants normalized to 1):")
    print(f"{'kind':<9} {'k':>3} {'j':>3} {'z':>3} {'eps':>6} {'n':>7} {'log size':>12}")
    for kind in ("center", "subspace"):
        for k in (10, 20):
            for eps in (0.5, 0.25):
                b = net_size_bound(kind, k, 2, 2, eps, 4096)
                print(f"{kind:<9} {k:>3} {2:>3} {2:>3} {eps:>6} {4096:>7} "
                      f"{b.log_size:>12.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
