"""Excess-risk measurement protocol.

Estimate the full-dataset optimum from seeded restarts, train on uniform
subsamples, evaluate every trained solution on the full dataset, and emit one
row per (z, j, k, n, repeat) cell. All randomness is derived from the config
seed and the cell coordinates, so results are identical regardless of worker
count or execution order.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import DomainError, SampleTooLarge
from .ingest import load, normalize_to_unit_ball, synthetic_mixture
from .objectives import CenterSolution, PointSet, center_cost, subspace_cost
from .riskcurve import RiskRow, write_rows
from .seeding import adaptive_subspace_seed, dz_seed, make_rng
from .solvers import SolverOptions, em_center, em_subspace

# Stream tags keep the seed derivations for different purposes disjoint.
_STREAM_OPT = 0
_STREAM_SAMPLE = 2
_STREAM_TRAIN = 3


@dataclass
class ExperimentConfig:
    dataset: str = "synthetic-mixture"
    dataset_format: str = "csv"
    label_col: str | None = None
    objective: str = "center"  # "center" or "subspace"
    z_list: list[int] = field(default_factory=lambda: [2])
    j_list: list[int] = field(default_factory=lambda: [0])
    k_grid: list[int] = field(default_factory=lambda: [10])
    n_grid: list[int] = field(default_factory=lambda: [64, 128])
    repeats: int = 5
    opt_restarts: int = 10
    seed: int = 0
    threads: int = 1
    with_replacement: bool = False
    solver: SolverOptions = field(default_factory=SolverOptions)
    synthetic_n: int = 20_000
    synthetic_d: int = 16
    synthetic_components: int = 20
    synthetic_spread: float = 0.15
    synthetic_mass_decay: float = 0.0
    synthetic_seed: int = 1

    def __post_init__(self):
        if self.objective not in ("center", "subspace"):
            raise DomainError(f"unknown objective {self.objective!r}")
        if not self.k_grid or not self.n_grid or not self.z_list:
            raise DomainError("grids must be nonempty")
        if self.repeats < 1 or self.opt_restarts < 1:
            raise DomainError("repeats and opt_restarts must be >= 1")
        if self.objective == "center":
            self.j_list = [0]
        elif any(j < 1 for j in self.j_list):
            raise DomainError("subspace objective needs j >= 1")


def load_dataset(config: ExperimentConfig) -> PointSet:
    if config.dataset == "synthetic-mixture":
        return synthetic_mixture(config.synthetic_n, config.synthetic_d,
                                 config.synthetic_components,
                                 config.synthetic_spread, config.synthetic_seed,
                                 mass_decay=config.synthetic_mass_decay)
    raw = load(config.dataset, format=config.dataset_format,
               label_col=config.label_col)
    return normalize_to_unit_ball(raw)


def evaluate(P: PointSet, solution) -> float:
    """Per-point cost of a solution on P."""
    if isinstance(solution, CenterSolution):
        _, total = center_cost(P, solution)
    else:
        _, total = subspace_cost(P, solution)
    return total / P.n


def train_once(P: PointSet, objective: str, k: int, z: int, j: int,
               rng, opts: SolverOptions):
    """One seeded init + EM run; returns (solution, per-point training cost)."""
    if objective == "center":
        init = dz_seed(P, k, z, rng)
        sol, trace = em_center(P, k, z, init, opts)
    else:
        init = adaptive_subspace_seed(P, k, j, rng)
        init.z = z
        sol, trace = em_subspace(P, k, j, z, init, opts)
    return sol, trace.costs[-1] / P.n


def train_best(P: PointSet, objective: str, k: int, z: int, j: int,
               restarts: int, seed: int, stream: tuple, opts: SolverOptions):
    """Best of `restarts` seeded runs, judged by cost on the training set."""
    best_sol = None
    best_cost = np.inf
    for r in range(restarts):
        rng = make_rng(seed, *stream, r)
        sol, cost = train_once(P, objective, k, z, j, rng, opts)
        if cost < best_cost:
            best_sol, best_cost = sol, cost
    return best_sol, best_cost


def estimate_opt_full(P: PointSet, objective: str, k: int, z: int, j: int,
                      restarts: int, seed: int, opts: SolverOptions):
    """Best of `restarts` full-dataset runs; the per-point minimum is the
    OPT estimate for this (objective, z, j, k)."""
    return train_best(P, objective, k, z, j, restarts, seed,
                      (_STREAM_OPT, z, j, k), opts)


def draw_sample(P: PointSet, n: int, seed: int, stream: tuple,
                with_replacement: bool = False) -> PointSet:
    if n > P.n and not with_replacement:
        raise SampleTooLarge(f"sample size {n} exceeds dataset size {P.n}")
    rng = make_rng(seed, *stream)
    idx = rng.choice(P.n, size=n, replace=with_replacement)
    return PointSet(P.points[idx].copy(), name=f"{P.name}[n={n}]")


# Worker-process state for the parallel path; populated by the initializer.
_WORKER = {}


def _pool_init(points, config_dict):
    _WORKER["P"] = PointSet(points)
    solver = SolverOptions(**config_dict.pop("solver"))
    _WORKER["config"] = ExperimentConfig(solver=solver, **config_dict)


def _run_cell(P: PointSet, config: ExperimentConfig, z: int, j: int, k: int,
              n: int, rep: int):
    sample = draw_sample(P, n, config.seed, (_STREAM_SAMPLE, z, j, k, n, rep),
                         config.with_replacement)
    sol, sample_cost = train_best(sample, config.objective, k, z, j,
                                  config.opt_restarts, config.seed,
                                  (_STREAM_TRAIN, z, j, k, n, rep), config.solver)
    return sample_cost, evaluate(P, sol)


def _cell_worker(cell):
    z, j, k, n, rep = cell
    return _run_cell(_WORKER["P"], _WORKER["config"], z, j, k, n, rep)


def excess_risk_curve(P: PointSet, config: ExperimentConfig):
    """All grid cells: per (z, j, k) an OPT estimate on the full set, then
    per (n, repeat) a sample-trained solution evaluated on the full set.

    Returns (rows, opt_values) with opt_values keyed by "z/j/k". Negative
    excess is possible and kept: OPT itself is only an estimate.
    """
    opt_values: dict[str, float] = {}
    for z in config.z_list:
        for j in config.j_list:
            for k in config.k_grid:
                _, opt = estimate_opt_full(P, config.objective, k, z, j,
                                           config.opt_restarts, config.seed,
                                           config.solver)
                opt_values[f"{z}/{j}/{k}"] = opt

    cells = [(z, j, k, n, rep)
             for z in config.z_list for j in config.j_list
             for k in config.k_grid for n in config.n_grid
             for rep in range(config.repeats)]
    if config.threads > 1:
        cfg = asdict(config)
        with ProcessPoolExecutor(max_workers=config.threads,
                                 initializer=_pool_init,
                                 initargs=(P.points, cfg)) as pool:
            results = list(pool.map(_cell_worker, cells, chunksize=4))
    else:
        results = [_run_cell(P, config, *cell) for cell in cells]

    rows = []
    for (z, j, k, n, rep), (sample_cost, full_cost) in zip(cells, results):
        opt = opt_values[f"{z}/{j}/{k}"]
        rows.append(RiskRow(
            dataset=P.name or config.dataset, objective=config.objective,
            z=z, j=j, k=k, n=n, repeat=rep, seed=config.seed,
            sample_cost=sample_cost, full_cost=full_cost,
            excess=full_cost - opt))
    return rows, opt_values


def run_experiment(config: ExperimentConfig, out_csv) -> tuple[Path, Path]:
    """Ingest, normalize, measure, and write the CSV plus a metadata sidecar.

    Identical (config, seed) produce byte-identical outputs; anything
    time-dependent lives in the run manifest, not here.
    """
    P = load_dataset(config)
    rows, opt_values = excess_risk_curve(P, config)
    out_csv = Path(out_csv)
    write_rows(out_csv, rows)
    digest = hashlib.sha256(np.ascontiguousarray(P.points).tobytes()).hexdigest()
    meta = {
        "tool_version": __version__,
        "config": _config_dict(config),
        "dataset_name": P.name,
        "dataset_shape": [P.n, P.d],
        "input_sha256": digest,
        "normalization": P.normalization,
        "opt_values": opt_values,
        "sampling": "with_replacement" if config.with_replacement
                    else "without_replacement",
        "subspace_seeding": "adaptive_squared_residual",
        "em_stopping": {"rel_tol": config.solver.rel_tol,
                        "max_em_iters": config.solver.max_em_iters},
        "rows": len(rows),
    }
    meta_path = out_csv.with_name(out_csv.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return out_csv, meta_path


def _config_dict(config: ExperimentConfig) -> dict:
    d = asdict(config)
    d["solver"] = asdict(config.solver)
    return d
