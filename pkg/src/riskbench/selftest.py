"""Condensed invariant suite behind the `selftest` subcommand.

One check bundle per module, sized to finish in seconds. Each bundle returns
(name, ok, detail); the CLI prints one line per bundle and exits nonzero on
any failure.
"""

from __future__ import annotations

import math

import numpy as np

from .complexity import empirical_complexity, rank_j_pool_check
from .curvefit import fit_power_law
from .hard_instance import analytic_opt, build_hard_instance, erm_hard, sample_hard
from .harness import ExperimentConfig, excess_risk_curve
from .ingest import RawDataset, normalize_to_unit_ball, synthetic_mixture
from .linalg import Projector, decomposition_terms, orthonormalize
from .objectives import CenterSolution, PointSet, power_bound_check
from .reduction import adaptive_projection, reduction_bound, unit_ball_net
from .seeding import adaptive_subspace_seed, dz_seed, make_rng
from .solvers import SolverOptions, em_center, erm_oracle_small


def _random_basis(rng, d, j):
    return orthonormalize([rng.standard_normal(d) for _ in range(j)])


def _check_linalg(seed):
    rng = make_rng(seed, 1)
    worst = 0.0
    for _ in range(200):
        d = int(rng.integers(3, 11))
        j = int(rng.integers(1, min(4, d) + 1))
        r = int(rng.integers(0, d + 1))
        U = _random_basis(rng, d, j)
        Pi = Projector(_random_basis(rng, d, r)) if r else Projector.zero(d)
        p = rng.standard_normal(d)
        p /= max(1.0, float(np.linalg.norm(p)))
        t1, t2, t3, t4, t5 = decomposition_terms(p, U, Pi)
        direct = float(np.linalg.norm(p - U.project(p)) ** 2)
        worst = max(worst, abs((t1 - t2 + t3 - t4 + t5) - direct))
    return worst < 1e-9, f"max identity residual {worst:.2e}"


def _check_objectives(seed):
    rng = make_rng(seed, 2)
    for _ in range(2000):
        b = float(rng.uniform(0.0, 2.0))
        z = int(rng.integers(1, 7))
        eps = float(10.0 ** rng.uniform(-3, 0))
        a2 = b * b + rng.uniform(-1.0, 1.0) * eps * b
        a = math.sqrt(max(a2, 0.0))
        if a > 2.0:
            continue
        if not power_bound_check(a, b, z, eps).all_satisfied:
            return False, f"bound violated at a={a}, b={b}, z={z}, eps={eps}"
    return True, "2000 hypothesis-satisfying pairs clean"


def _check_seeding(seed):
    rng1 = make_rng(seed, 3)
    rng2 = make_rng(seed, 3)
    P = PointSet(make_rng(seed, 4).uniform(-0.5, 0.5, (40, 3)))
    a = dz_seed(P, 4, 2, rng1)
    b = dz_seed(P, 4, 2, rng2)
    if not np.array_equal(a.centers, b.centers):
        return False, "dz_seed is not reproducible"
    sol = adaptive_subspace_seed(P, 2, 2, make_rng(seed, 5))
    if not sol.validate():
        return False, "seeded basis fails orthonormality"
    return True, "reproducible seeds, orthonormal bases"


def _check_solvers(seed):
    P = PointSet(np.array([[0.0], [0.2], [1.0], [1.2]]) - 0.6)
    init = CenterSolution(P.points[[0, 2]].copy(), 2)
    sol, trace = em_center(P, 2, 2, init)
    diffs = np.diff(trace.costs)
    if np.any(diffs > 0):
        return False, "cost trace increased"
    _, oracle_cost = erm_oracle_small(P, 2, 2)
    if trace.costs[-1] > oracle_cost * 1.05 + 1e-12:
        return False, "EM landed above 1.05x oracle"
    return True, f"monotone trace, final {trace.costs[-1]:.3f} vs oracle {oracle_cost:.3f}"


def _check_reduction(seed):
    rng = make_rng(seed, 6)
    for _ in range(30):
        d = int(rng.integers(4, 16))
        j = int(rng.integers(1, 4))
        n = int(rng.integers(5, 40))
        eps = float(rng.choice([0.25, 0.4, 0.5]))
        pts = rng.standard_normal((n, d))
        pts /= np.maximum(1.0, np.linalg.norm(pts, axis=1))[:, None]
        P = PointSet(pts)
        U = _random_basis(rng, d, j)
        red = adaptive_projection(P, U, eps)
        if red.size > reduction_bound(j, eps):
            return False, "selected more points than ceil(j/eps^2)"
        res = pts - (pts @ red.projector.basis.cols) @ red.projector.basis.cols.T \
            if red.projector.rank else pts
        lhs = np.linalg.norm(res @ U.cols, axis=1)
        rhs = eps * np.linalg.norm(res, axis=1)
        if np.any(lhs > rhs + 1e-9):
            return False, "per-point guarantee violated"
        for t, pot in enumerate(red.potential_trace, start=1):
            if pot < eps * eps * t - 1e-9:
                return False, "potential invariant violated"
    net = unit_ball_net(2, 0.5)
    q = make_rng(seed, 7).uniform(-1, 1, (500, 2))
    q /= np.maximum(1.0, np.linalg.norm(q, axis=1))[:, None]
    dmin = np.min(np.linalg.norm(q[:, None, :] - net[None, :, :], axis=2), axis=1)
    if np.any(dmin > 0.5 + 1e-9):
        return False, "unit-ball net failed a covering query"
    return True, "30 reduction trials + net covering clean"


def _check_complexity(seed):
    rng = make_rng(seed, 8)
    zero = [np.zeros(8)]
    est = empirical_complexity(zero, "rademacher", 200, rng)
    if est.value != 0.0:
        return False, "zero pool must estimate 0"
    pts = rng.standard_normal((48, 6))
    pts /= np.maximum(1.0, np.linalg.norm(pts, axis=1))[:, None]
    rep = rank_j_pool_check(PointSet(pts), 2, 50, 400, rng)
    if not rep.passed:
        return False, f"rank-j bound failed: {rep.estimate.value:.3f} > {rep.bound:.3f}"
    return True, f"rank-j estimate {rep.estimate.value:.3f} <= {rep.bound:.3f}"


def _check_hard(seed):
    rng = make_rng(seed, 9)
    inst = build_hard_instance(2, 1, 0.1)
    for n in (64, 256, 1024):
        for _ in range(20):
            _, counts = sample_hard(inst, n, rng)
            erm = erm_hard(inst, counts)
            if abs(erm.excess - inst.p * inst.eps * erm.b_ex) > 1e-12:
                return False, "excess accounting identity violated"
    if abs(analytic_opt(inst) - 2 * inst.p * 0.9) > 1e-15:
        return False, "analytic OPT mismatch"
    return True, "accounting identity exact on 60 draws"


def _check_curvefit(seed):
    ks = [10, 20, 30, 50]
    ns = [2 ** e for e in range(6, 13)]
    rows = [(k, n, 0.03 * k ** 0.44 / n ** 0.54) for k in ks for n in ns]
    fit = fit_power_law(rows)
    ok = (abs(fit.c - 0.03) < 1e-2 and abs(fit.q1 - 0.44) < 1e-2
          and abs(fit.q2 - 0.54) < 1e-2)
    return ok, f"recovered (c,q1,q2)=({fit.c:.3f},{fit.q1:.3f},{fit.q2:.3f})"


def _check_harness(seed):
    P = synthetic_mixture(300, 4, 3, 0.08, seed)
    config = ExperimentConfig(k_grid=[3], n_grid=[32, 64], repeats=2,
                              opt_restarts=2, seed=seed, z_list=[2],
                              solver=SolverOptions(max_em_iters=15))
    rows_a, _ = excess_risk_curve(P, config)
    rows_b, _ = excess_risk_curve(P, config)
    if [r.as_record() for r in rows_a] != [r.as_record() for r in rows_b]:
        return False, "harness rows are not reproducible"
    return True, f"{len(rows_a)} reproducible rows"


def _check_ingest(seed):
    rng = make_rng(seed, 10)
    raw = RawDataset(matrix=rng.uniform(-3, 7, (50, 4)), labels=None, source="mem")
    P = normalize_to_unit_ball(raw)
    if not P.validate_in_ball(1e-12):
        return False, "normalization left points outside the ball"
    return True, f"max norm {P.max_norm():.6f}"


def run_selftest(seed: int = 0):
    checks = [
        ("linalg", _check_linalg),
        ("objectives", _check_objectives),
        ("seeding", _check_seeding),
        ("solvers", _check_solvers),
        ("reduction", _check_reduction),
        ("complexity", _check_complexity),
        ("hard-instance", _check_hard),
        ("curve-fit", _check_curvefit),
        ("harness", _check_harness),
        ("ingest", _check_ingest),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn(seed)
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"exception: {exc!r}"
        results.append((name, ok, detail))
    return results
