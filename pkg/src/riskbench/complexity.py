"""Monte-Carlo estimates of Rademacher and Gaussian complexities over finite
pools of cost vectors.

A finite pool only ever lower-bounds the sup over all solutions, so every
check here is one-sided: pool estimates must stay below the theoretical upper
bounds (plus Monte-Carlo allowance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyPool
from .linalg import orthonormalize
from .objectives import PointSet

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass
class ComplexityEstimate:
    value: float
    stderr: float
    trials: int
    kind: str


def _pool_matrix(pool) -> np.ndarray:
    if not pool:
        raise EmptyPool("empty cost-vector pool")
    rows = [np.asarray(getattr(v, "values", v), dtype=float).reshape(-1) for v in pool]
    n = rows[0].shape[0]
    if any(r.shape[0] != n for r in rows):
        raise DomainError("pool vectors must share one length")
    return np.stack(rows)


def _draws(kind: str, trials: int, n: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "rademacher":
        return rng.integers(0, 2, size=(trials, n)) * 2.0 - 1.0
    if kind == "gaussian":
        return rng.standard_normal((trials, n))
    raise DomainError(f"unknown complexity kind {kind!r}")


def _estimate_from_draws(V: np.ndarray, R: np.ndarray, kind: str) -> ComplexityEstimate:
    n = V.shape[1]
    per_trial = (R @ V.T).max(axis=1) / n
    value = float(per_trial.mean())
    stderr = float(per_trial.std(ddof=1) / math.sqrt(len(per_trial)))
    return ComplexityEstimate(value=value, stderr=stderr,
                              trials=len(per_trial), kind=kind)


def empirical_complexity(pool, kind: str, trials: int,
                         rng: np.random.Generator) -> ComplexityEstimate:
    """Average over trials of sup_v (1/n) <v, r> with r sign flips
    (rademacher) or standard normals (gaussian)."""
    if trials < 100:
        raise DomainError("need at least 100 trials for a usable stderr")
    V = _pool_matrix(pool)
    R = _draws(kind, trials, V.shape[1], rng)
    return _estimate_from_draws(V, R, kind)


def trial_suprema(pool, kind: str, trials: int,
                  rng: np.random.Generator) -> np.ndarray:
    """The per-trial pool suprema behind the estimate; with a shared rng
    state these are comparable draw by draw across pools."""
    V = _pool_matrix(pool)
    R = _draws(kind, trials, V.shape[1], rng)
    return (R @ V.T).max(axis=1) / V.shape[1]


def paired_complexities(pool, trials: int, rng: np.random.Generator):
    """Rademacher and Gaussian estimates from shared draws (r = sign(g)).

    Sharing the randomness keeps the sqrt(2 pi) comparison visible at small
    trial counts; with independent draws it drowns in Monte-Carlo noise.
    """
    if trials < 100:
        raise DomainError("need at least 100 trials for a usable stderr")
    V = _pool_matrix(pool)
    G = rng.standard_normal((trials, V.shape[1]))
    R = np.where(G >= 0.0, 1.0, -1.0)
    return (_estimate_from_draws(V, R, "rademacher"),
            _estimate_from_draws(V, G, "gaussian"))


def random_rank_j_pool(P: PointSet, j: int, pool_size: int,
                       rng: np.random.Generator):
    """Squared-residual cost vectors of pool_size random rank-j bases."""
    if not (1 <= j <= P.d):
        raise DomainError(f"need 1 <= j <= d; got j={j}, d={P.d}")
    vectors = []
    for _ in range(pool_size):
        basis = orthonormalize([rng.standard_normal(P.d) for _ in range(j)])
        R = P.points - (P.points @ basis.cols) @ basis.cols.T
        vectors.append(np.einsum("nd,nd->n", R, R))
    return vectors


@dataclass
class RankPoolReport:
    n: int
    j: int
    pool_size: int
    estimate: ComplexityEstimate
    bound: float

    @property
    def passed(self) -> bool:
        return self.estimate.value <= self.bound + 3.0 * self.estimate.stderr


def rank_j_pool_check(P: PointSet, j: int, pool_size: int, trials: int,
                      rng: np.random.Generator) -> RankPoolReport:
    """Estimate the pool Rademacher complexity of rank-j squared-residual
    costs and compare against the sqrt(j/n) bound for points in the ball."""
    if not P.validate_in_ball(1e-6):
        raise DomainError("points must lie in the unit ball")
    pool = random_rank_j_pool(P, j, pool_size, rng)
    est = empirical_complexity(pool, "rademacher", trials, rng)
    return RankPoolReport(n=P.n, j=j, pool_size=pool_size, estimate=est,
                          bound=math.sqrt(j / P.n))
