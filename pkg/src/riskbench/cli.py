"""Command-line front end.

Subcommands: run (excess-risk experiment), hard (lower-bound scaling), fit
(power-law fit), reduce (adaptive-projection sweep), complexity (estimator
sweep), fetch (checksummed download), selftest (invariant suite).

Config files are flat `key = value` lines; int lists are comma separated and
geometric ranges are written lo:hi:xM. Every flag overrides the file. Exit
codes: 0 ok, 1 invariant violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .complexity import paired_complexities, random_rank_j_pool
from .curvefit import fit_power_law
from .errors import RiskbenchError
from .harness import ExperimentConfig, run_experiment
from .hard_instance import hard_scaling_experiment, sensitivity_eps
from .ingest import fetch as fetch_file
from .objectives import PointSet
from .linalg import orthonormalize
from .reduction import adaptive_projection, reduction_bound
from .riskcurve import read_rows, write_rows
from .seeding import make_rng
from .selftest import run_selftest

_USAGE_EXIT = 2


def parse_int_list(text: str) -> list[int]:
    """Comma list `a,b,c` or geometric range `lo:hi:xM`."""
    text = text.strip()
    if ":" in text:
        lo_s, hi_s, step_s = text.split(":")
        if not step_s.startswith("x"):
            raise ValueError(f"geometric range step must look like x2; got {step_s!r}")
        lo, hi, mult = int(lo_s), int(hi_s), int(step_s[1:])
        if lo < 1 or hi < lo or mult < 2:
            raise ValueError(f"bad geometric range {text!r}")
        out = []
        v = lo
        while v <= hi:
            out.append(v)
            v *= mult
        return out
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _coerce(value: str):
    value = value.strip()
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    return value


def load_config_file(path) -> dict:
    """Flat `key = value` lines; '#' starts a comment."""
    out: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def default_seed(args_seed):
    if args_seed is not None:
        return int(args_seed)
    env = os.environ.get("RISKBENCH_SEED")
    return int(env) if env else 0


def append_manifest(out_path, subcommand: str, seed, outputs: list[str],
                    config_path=None, manifest_path=None) -> Path:
    """One JSON line per run, appended; the only place timestamps live."""
    if manifest_path is None:
        base = Path(outputs[0]) if outputs else Path("riskbench")
        manifest_path = base.with_name(base.name + ".manifest.jsonl")
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    record = {
        "subcommand": subcommand,
        "config": str(config_path) if config_path else None,
        "seed": seed,
        "outputs": [str(o) for o in outputs],
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    with open(manifest_path, "a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
    return manifest_path


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_run(args) -> int:
    file_cfg = load_config_file(args.config) if args.config else {}

    def pick(key, flag_value, default, conv=lambda x: x):
        if flag_value is not None:
            return flag_value
        if key in file_cfg:
            return conv(file_cfg[key])
        return default

    seed = default_seed(args.seed if args.seed is not None
                        else file_cfg.get("seed"))
    solver_kwargs = {}
    for key, conv in (("max_em_iters", int), ("rel_tol", float),
                      ("gd_learning_rate", float), ("gd_iters", int),
                      ("empty_cluster_policy", str), ("gd_patience", int)):
        flag = getattr(args, key, None)
        if flag is not None:
            solver_kwargs[key] = flag
        elif key in file_cfg:
            solver_kwargs[key] = conv(file_cfg[key])
    from .solvers import SolverOptions
    config = ExperimentConfig(
        dataset=pick("dataset", args.dataset, "synthetic-mixture"),
        dataset_format=pick("dataset_format", args.dataset_format, "csv"),
        label_col=pick("label_col", args.label_col, None),
        objective=pick("objective", args.objective, "center"),
        z_list=pick("z", parse_int_list(args.z) if args.z else None, [2],
                    parse_int_list),
        j_list=pick("j", parse_int_list(args.j) if args.j else None, [0],
                    parse_int_list),
        k_grid=pick("k_grid", parse_int_list(args.k_grid) if args.k_grid else None,
                    [10], parse_int_list),
        n_grid=pick("n_grid", parse_int_list(args.n_grid) if args.n_grid else None,
                    [64, 128], parse_int_list),
        repeats=int(pick("repeats", args.repeats, 5)),
        opt_restarts=int(pick("opt_restarts", args.opt_restarts, 10)),
        seed=seed,
        threads=int(pick("threads", args.threads, os.cpu_count() or 1)),
        with_replacement=bool(pick("with_replacement", args.with_replacement,
                                   False, lambda v: _coerce(v) is True)),
        solver=SolverOptions(**solver_kwargs),
        synthetic_n=int(pick("synthetic_n", None, 20_000)),
        synthetic_d=int(pick("synthetic_d", None, 16)),
        synthetic_components=int(pick("synthetic_components", None, 20)),
        synthetic_spread=float(pick("synthetic_spread", None, 0.15)),
        synthetic_mass_decay=float(pick("synthetic_mass_decay", None, 0.0)),
        synthetic_seed=int(pick("synthetic_seed", None, 1)),
    )
    out = pick("out", args.out, "risk.csv")
    csv_path, meta_path = run_experiment(config, out)
    append_manifest(out, "run", seed, [str(csv_path), str(meta_path)],
                    config_path=args.config, manifest_path=args.manifest)
    print(f"wrote {csv_path} ({meta_path.name} alongside)")
    return 0


def _cmd_hard(args) -> int:
    seed = default_seed(args.seed)
    n_grid = parse_int_list(args.n_grid)
    eps = args.eps if args.eps is not None else sensitivity_eps(args.k, args.j, n_grid)
    rows = hard_scaling_experiment(args.k, args.j, [eps], n_grid,
                                   args.repeats, seed)
    write_rows(args.out, rows)
    append_manifest(args.out, "hard", seed, [args.out],
                    manifest_path=args.manifest)
    print(f"wrote {args.out}: {len(rows)} rows at eps={eps:g}")
    return 0


def _cmd_fit(args) -> int:
    rows = read_rows(args.csv)
    if args.z is not None:
        rows = [r for r in rows if r.z == args.z]
    data = [(r.k, r.n, r.excess) for r in rows]
    fit = fit_power_law(data)
    payload = {"c": fit.c, "q1": fit.q1, "q2": fit.q2, "lse": fit.lse,
               "rows": fit.rows, "q1_frozen": fit.q1_frozen,
               "iterations": fit.iterations}
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        append_manifest(args.out, "fit", None, [args.out],
                        manifest_path=args.manifest)
    print(text)
    return 0


def _cmd_reduce(args) -> int:
    seed = default_seed(args.seed)
    rng = make_rng(seed, 4242)
    eps_values = [float(tok) for tok in args.eps_list.split(",")]
    violations = 0
    records = []
    for trial in range(args.trials):
        d = int(rng.integers(4, args.max_d + 1))
        j = int(rng.integers(1, args.max_j + 1))
        n = int(rng.integers(5, args.max_n + 1))
        eps = float(rng.choice(eps_values))
        pts = rng.standard_normal((n, d))
        pts /= np.maximum(1.0, np.linalg.norm(pts, axis=1))[:, None]
        U = orthonormalize([rng.standard_normal(d) for _ in range(min(j, d))])
        red = adaptive_projection(PointSet(pts), U, eps)
        if red.projector.rank:
            cols = red.projector.basis.cols
            res = pts - (pts @ cols) @ cols.T
        else:
            res = pts
        lhs = np.linalg.norm(res @ U.cols, axis=1)
        rhs = eps * np.linalg.norm(res, axis=1)
        max_ratio_slack = float(np.max(lhs - rhs))
        potential_ok = all(pot >= eps * eps * t - 1e-9
                           for t, pot in enumerate(red.potential_trace, start=1))
        ok = (max_ratio_slack <= 1e-9 and red.size <= reduction_bound(U.rank, eps)
              and potential_ok)
        violations += 0 if ok else 1
        records.append({"trial": trial, "d": d, "j": U.rank, "n": n, "eps": eps,
                        "selected": red.size,
                        "bound": reduction_bound(U.rank, eps),
                        "guarantee_slack": max_ratio_slack,
                        "potential_ok": potential_ok, "ok": ok})
    lines = "\n".join(json.dumps(r, sort_keys=True) for r in records)
    if args.out:
        Path(args.out).write_text(lines + "\n")
        append_manifest(args.out, "reduce", seed, [args.out],
                        manifest_path=args.manifest)
    else:
        print(lines)
    print(f"reduce sweep: {args.trials} trials, {violations} violations")
    return 0 if violations == 0 else 1


def _cmd_complexity(args) -> int:
    seed = default_seed(args.seed)
    n_list = parse_int_list(args.n_list)
    j_list = parse_int_list(args.j_list)
    lines = ["n,j,kind,estimate,stderr,bound"]
    failures = 0
    for n in n_list:
        for j in j_list:
            rng = make_rng(seed, 77, n, j)
            pts = rng.standard_normal((n, args.d))
            pts /= np.maximum(1.0, np.linalg.norm(pts, axis=1))[:, None]
            P = PointSet(pts)
            pool = random_rank_j_pool(P, j, args.pool, rng)
            rad, gauss = paired_complexities(pool, args.trials, rng)
            bound = math.sqrt(j / n)
            for est in (rad, gauss):
                lines.append(f"{n},{j},{est.kind},{est.value!r},"
                             f"{est.stderr!r},{bound!r}")
            if rad.value > bound + 3.0 * rad.stderr:
                failures += 1
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        append_manifest(args.out, "complexity", seed, [args.out],
                        manifest_path=args.manifest)
    else:
        print(text, end="")
    print(f"complexity sweep: {len(n_list) * len(j_list)} cells, "
          f"{failures} bound failures")
    return 0 if failures == 0 else 1


def _cmd_fetch(args) -> int:
    path = fetch_file(args.url, args.sha256, args.dest)
    append_manifest(args.dest, "fetch", None, [str(path)],
                    manifest_path=args.manifest)
    print(f"fetched {path}")
    return 0


def _cmd_selftest(args) -> int:
    seed = default_seed(args.seed)
    results = run_selftest(seed)
    failed = 0
    for name, ok, detail in results:
        status = "ok" if ok else "FAIL"
        print(f"{name:<14} {status:<5} {detail}")
        failed += 0 if ok else 1
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskbench",
        description="Clustering sample-complexity measurement bench")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="excess-risk experiment from a config")
    run_p.add_argument("--config")
    run_p.add_argument("--dataset")
    run_p.add_argument("--dataset-format", dest="dataset_format")
    run_p.add_argument("--label-col", dest="label_col")
    run_p.add_argument("--objective", choices=["center", "subspace"])
    run_p.add_argument("--z")
    run_p.add_argument("--j")
    run_p.add_argument("--k-grid", dest="k_grid")
    run_p.add_argument("--n-grid", dest="n_grid")
    run_p.add_argument("--repeats", type=int)
    run_p.add_argument("--opt-restarts", dest="opt_restarts", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--threads", type=int)
    run_p.add_argument("--with-replacement", dest="with_replacement",
                       action="store_const", const=True)
    run_p.add_argument("--max-em-iters", dest="max_em_iters", type=int)
    run_p.add_argument("--rel-tol", dest="rel_tol", type=float)
    run_p.add_argument("--gd-learning-rate", dest="gd_learning_rate", type=float)
    run_p.add_argument("--gd-iters", dest="gd_iters", type=int)
    run_p.add_argument("--gd-patience", dest="gd_patience", type=int)
    run_p.add_argument("--empty-cluster-policy", dest="empty_cluster_policy",
                       choices=["reseed_farthest", "drop"])
    run_p.add_argument("--out")
    run_p.add_argument("--manifest")
    run_p.set_defaults(func=_cmd_run)

    hard_p = sub.add_parser("hard", help="lower-bound instance scaling run")
    hard_p.add_argument("--k", type=int, required=True)
    hard_p.add_argument("--j", type=int, required=True)
    hard_p.add_argument("--eps", type=float,
                        help="default: sqrt(kj/n) at the grid midpoint")
    hard_p.add_argument("--n-grid", dest="n_grid", required=True)
    hard_p.add_argument("--repeats", type=int, default=50)
    hard_p.add_argument("--seed", type=int)
    hard_p.add_argument("--out", required=True)
    hard_p.add_argument("--manifest")
    hard_p.set_defaults(func=_cmd_hard)

    fit_p = sub.add_parser("fit", help="fit c*k^q1/n^q2 to a risk CSV")
    fit_p.add_argument("--csv", required=True)
    fit_p.add_argument("--z", type=int, help="restrict to one z")
    fit_p.add_argument("--out")
    fit_p.add_argument("--manifest")
    fit_p.set_defaults(func=_cmd_fit)

    red_p = sub.add_parser("reduce", help="adaptive-projection property sweep")
    red_p.add_argument("--trials", type=int, default=200)
    red_p.add_argument("--max-d", dest="max_d", type=int, default=30)
    red_p.add_argument("--max-j", dest="max_j", type=int, default=4)
    red_p.add_argument("--max-n", dest="max_n", type=int, default=100)
    red_p.add_argument("--eps-list", dest="eps_list", default="0.2,0.35,0.5")
    red_p.add_argument("--seed", type=int)
    red_p.add_argument("--out")
    red_p.add_argument("--manifest")
    red_p.set_defaults(func=_cmd_reduce)

    cx_p = sub.add_parser("complexity", help="Monte-Carlo complexity sweep")
    cx_p.add_argument("--n-list", dest="n_list", default="32,64,128")
    cx_p.add_argument("--j-list", dest="j_list", default="1,2,3")
    cx_p.add_argument("--d", type=int, default=8)
    cx_p.add_argument("--pool", type=int, default=200)
    cx_p.add_argument("--trials", type=int, default=2000)
    cx_p.add_argument("--seed", type=int)
    cx_p.add_argument("--out")
    cx_p.add_argument("--manifest")
    cx_p.set_defaults(func=_cmd_complexity)

    fetch_p = sub.add_parser("fetch", help="checksummed download")
    fetch_p.add_argument("--url", required=True)
    fetch_p.add_argument("--sha256", required=True)
    fetch_p.add_argument("--dest", required=True)
    fetch_p.add_argument("--manifest")
    fetch_p.set_defaults(func=_cmd_fetch)

    st_p = sub.add_parser("selftest", help="run the invariant suite")
    st_p.add_argument("--seed", type=int)
    st_p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return _USAGE_EXIT
    except RiskbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
