"""Randomized initializations: distance-power seeding for centers and
adaptive squared-residual seeding for subspace collections."""

from __future__ import annotations

import numpy as np

from .errors import AllZero, DimensionMismatch, EmptyInput
from .linalg import OrthoBasis
from .objectives import (CenterSolution, PointSet, SubspaceSolution,
                         powered_from_sq)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic generator for (seed, stream...).

    Identical arguments give identical draw sequences on every platform.
    Distinct stream tuples give statistically independent streams.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def min_power_dists(P: PointSet, centers: np.ndarray, z: int) -> np.ndarray:
    """min-over-centers ||p - s||^z for every point."""
    diff = P.points[:, None, :] - centers[None, :, :]
    sq = np.einsum("nkd,nkd->nk", diff, diff)
    best = np.maximum(np.min(sq, axis=1), 0.0)
    return powered_from_sq(best, z)


def dz_probabilities(P: PointSet, centers: np.ndarray, z: int) -> np.ndarray:
    """Law of the next seeded center: proportional to min-dist^z.

    Falls back to uniform when every point already has distance 0 (fewer
    distinct points than requested centers).
    """
    w = min_power_dists(P, centers, z)
    total = w.sum()
    if total <= 0.0:
        return np.full(P.n, 1.0 / P.n)
    return w / total


def dz_seed(P: PointSet, k: int, z: int, rng: np.random.Generator) -> CenterSolution:
    """Sample k centers from P, each proportional to distance^z to the
    current center set; the first is uniform.

    Min-distances are maintained incrementally, so seeding is O(n k d).
    A point at distance 0 has zero mass and is never drawn while any point
    has positive distance; if every distance is 0 the fallback is uniform.
    """
    if P.n == 0:
        raise EmptyInput("cannot seed from an empty point set")
    if not (1 <= k <= P.n):
        raise EmptyInput(f"need 1 <= k <= n; got k={k}, n={P.n}")
    first = int(rng.integers(P.n))
    idx = [first]
    diff = P.points - P.points[first]
    cur_sq = np.einsum("nd,nd->n", diff, diff)
    for _ in range(k - 1):
        w = powered_from_sq(np.maximum(cur_sq, 0.0), z)
        total = w.sum()
        probs = w / total if total > 0.0 else np.full(P.n, 1.0 / P.n)
        pick = int(rng.choice(P.n, p=probs))
        idx.append(pick)
        diff = P.points - P.points[pick]
        cur_sq = np.minimum(cur_sq, np.einsum("nd,nd->n", diff, diff))
    return CenterSolution(P.points[idx].copy(), z)


def adaptive_subspace_seed(P: PointSet, k: int, j: int,
                           rng: np.random.Generator) -> SubspaceSolution:
    """Seed k rank-at-most-j bases by adaptive squared-residual sampling.

    Rounds proceed globally: each pick is drawn with probability proportional
    to its squared residual against the span of all previously picked points,
    and consecutive groups of j picks are orthonormalized into one basis.
    When the residual mass is exhausted early, remaining bases stay at lower
    rank (possibly rank 0).
    """
    if P.n == 0:
        raise EmptyInput("cannot seed from an empty point set")
    if k < 1 or not (1 <= j <= P.d):
        raise DimensionMismatch(f"need k >= 1 and 1 <= j <= d; got k={k}, j={j}")
    res_sq = np.einsum("nd,nd->n", P.points, P.points).astype(float)
    if res_sq.sum() <= 0.0:
        raise AllZero("all points are zero; no subspace directions to sample")

    span_cols: list[np.ndarray] = []
    bases: list[OrthoBasis] = []
    for _ in range(k):
        group: list[np.ndarray] = []
        for _ in range(j):
            mass = res_sq.sum()
            if mass <= 1e-24:
                break
            pick = int(rng.choice(P.n, p=res_sq / mass))
            p = P.points[pick]
            group.append(p.copy())
            w = p.copy()
            for _ in range(2):
                for u in span_cols:
                    w -= (u @ w) * u
            nrm = np.linalg.norm(w)
            if nrm >= 1e-10:
                w /= nrm
                span_cols.append(w)
                res_sq = np.maximum(res_sq - (P.points @ w) ** 2, 0.0)
            else:
                res_sq[pick] = 0.0  # sampled point numerically in span already
        if group:
            cols: list[np.ndarray] = []
            for v in group:
                u = v.copy()
                for _ in range(2):
                    for c in cols:
                        u -= (c @ u) * c
                nrm = np.linalg.norm(u)
                if nrm >= 1e-10:
                    cols.append(u / nrm)
            basis = OrthoBasis(np.column_stack(cols)) if cols else OrthoBasis.empty(P.d)
        else:
            basis = OrthoBasis.empty(P.d)
        bases.append(basis)
    return SubspaceSolution(bases, j=j, z=2)
