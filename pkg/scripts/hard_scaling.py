#!/usr/bin/env python3
"""Lower-bound instance scaling: sample, solve the exact ERM, fit the rate.

    python scripts/hard_scaling.py --k 2 --j 1 --repeats 200 --out runs/hard
"""

import argparse
import json
import sys
from pathlib import Path

from riskbench import fit_power_law, hard_scaling_experiment
from riskbench.hard_instance import sensitivity_eps
from riskbench.riskcurve import write_rows


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--k", type=int, default=2)
    parser.add_argument("--j", type=int, default=1)
    parser.add_argument("--eps", type=float)
    parser.add_argument("--n-min-exp", type=int, default=6)
    parser.add_argument("--n-max-exp", type=int, default=14)
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", default="runs/hard")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n_grid = [2 ** e for e in range(args.n_min_exp, args.n_max_exp + 1)]
    eps = args.eps if args.eps is not None else \
        sensitivity_eps(args.k, args.j, n_grid)
    rows = hard_scaling_experiment(args.k, args.j, [eps], n_grid,
                                   args.repeats, args.seed)
    csv_path = out / "hard.csv"
    write_rows(csv_path, rows)
    fit = fit_power_law([(r.k, r.n, r.excess) for r in rows])
    fit_path = out / "fit.json"
    fit_path.write_text(json.dumps(
        {"c": fit.c, "q1": fit.q1, "q2": fit.q2, "eps": eps,
         "q1_frozen": fit.q1_frozen}, indent=2) + "\n")
    print(f"eps={eps:.4f} fitted q2={fit.q2:.3f} -> {csv_path}, {fit_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
