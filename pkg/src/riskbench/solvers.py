"""EM-style local optimization for center and subspace clustering, plus an
exhaustive oracle for tiny instances.

M-steps are closed form where one exists (means for z=2 centers, top singular
subspaces for z=2 subspaces) and gradient based otherwise. Every M-step is
accept-guarded: a cluster keeps its old center/basis unless the candidate
strictly lowers that cluster's cost, which makes the reported cost trace
non-increasing by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError, EmptyCluster, TooLarge
from .linalg import OrthoBasis, orthonormalize, top_j_singular_subspace
from .objectives import (CenterSolution, CostVector, PointSet,
                         SubspaceSolution, center_cost, powered_from_sq,
                         subspace_cost)

_ADAM_B1 = 0.9
_ADAM_B2 = 0.999
_ADAM_EPS = 1e-8

# Totals at or below this are numerically zero for unit-ball data; iterating
# further only chases roundoff.
_ZERO_COST = 1e-24


@dataclass
class SolverOptions:
    max_em_iters: int = 100
    rel_tol: float = 1e-6
    gd_learning_rate: float = 0.01
    gd_iters: int = 500
    empty_cluster_policy: str = "reseed_farthest"  # or "drop"
    gd_patience: int = 30  # gradient steps without improvement before bailing

    def __post_init__(self):
        if self.max_em_iters <= 0 or self.gd_iters <= 0 or self.gd_patience <= 0:
            raise DomainError("iteration counts must be positive")
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError("rel_tol must lie in (0, 1)")
        if self.gd_learning_rate <= 0.0:
            raise DomainError("learning rate must be positive")
        if self.empty_cluster_policy not in ("reseed_farthest", "drop"):
            raise DomainError(f"unknown policy {self.empty_cluster_policy!r}")


@dataclass
class SolveTrace:
    costs: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def _power_weights(r, sq, z):
    """z * r^(z-2) with the z=1 subgradient-0 convention at r=0."""
    if z == 1:
        return np.where(r > 0.0, 1.0 / np.maximum(r, 1e-300), 0.0)
    if z == 2:
        return np.full_like(r, 2.0)
    if z == 3:
        return 3.0 * r
    if z == 4:
        return 4.0 * sq
    return float(z) * np.where(r > 0.0, r, 1.0) ** (z - 2)


def _powered(r, sq, z):
    if z == 1:
        return r
    if z == 2:
        return sq
    if z == 3:
        return r * sq
    if z == 4:
        return sq * sq
    return r ** z


def _exact_cluster_cost(pts: np.ndarray, center: np.ndarray, z: int) -> float:
    """Cluster cost with the same per-pair arithmetic as center_cost."""
    diff = pts - center
    sq = np.einsum("nd,nd->n", diff, diff)
    return math.fsum(powered_from_sq(sq, z).tolist())


def _exact_subspace_cluster_cost(pts: np.ndarray, basis: OrthoBasis, z: int) -> float:
    if basis.rank == 0:
        R = pts
    else:
        R = pts - (pts @ basis.cols) @ basis.cols.T
    sq = np.einsum("nd,nd->n", R, R)
    return math.fsum(powered_from_sq(sq, z).tolist())


def _adam_on_centers(Ps, bounds, counts, S0, z, opts: SolverOptions):
    """Adam-style descent on all cluster centers at once.

    Ps holds the points sorted by label; bounds/counts delimit clusters.
    Returns the best-seen center per cluster and its (plain-sum) cost.
    The update rule is the decoupled-weight-decay variant with decay 0,
    i.e. plain adaptive moments; decay would drag centers toward the origin.
    """
    k, d = S0.shape
    S = S0.copy()
    m = np.zeros_like(S)
    v = np.zeros_like(S)
    lr = opts.gd_learning_rate
    safe_counts = np.maximum(counts, 1)[:, None].astype(float)

    def _eval(Scur):
        rep = np.repeat(Scur, counts, axis=0)
        D = rep - Ps
        sq = np.einsum("nd,nd->n", D, D)
        r = np.sqrt(sq)
        fr = _powered(r, sq, z)
        cf = np.concatenate(([0.0], np.cumsum(fr)))
        f_c = cf[bounds[1:]] - cf[bounds[:-1]]
        return D, sq, r, f_c

    D, sq, r, f_c = _eval(S)
    S_best = S.copy()
    f_best = f_c.copy()
    stall = 0
    for t in range(1, opts.gd_iters + 1):
        w = _power_weights(r, sq, z)
        G = w[:, None] * D
        cg = np.concatenate((np.zeros((1, d)), np.cumsum(G, axis=0)))
        grad = (cg[bounds[1:]] - cg[bounds[:-1]]) / safe_counts
        m = _ADAM_B1 * m + (1.0 - _ADAM_B1) * grad
        v = _ADAM_B2 * v + (1.0 - _ADAM_B2) * grad * grad
        mhat = m / (1.0 - _ADAM_B1 ** t)
        vhat = v / (1.0 - _ADAM_B2 ** t)
        S = S - lr * mhat / (np.sqrt(vhat) + _ADAM_EPS)
        D, sq, r, f_c = _eval(S)
        improved = f_c < f_best - 1e-12 * np.maximum(f_best, 1.0)
        if np.any(improved):
            S_best[improved] = S[improved]
            stall = 0
        else:
            stall += 1
            if stall >= opts.gd_patience:
                break
        np.minimum(f_best, f_c, out=f_best)
    return S_best, f_best


def center_update_gd(cluster, z: int, init, opts: SolverOptions | None = None):
    """Best-seen center of one cluster under sum ||p - s||^z, via adaptive
    moment gradient descent (lr from opts, default 0.01).

    z=2 is accepted as a baseline check against the closed-form mean; the EM
    solvers never route z=2 through here."""
    opts = opts or SolverOptions()
    pts = np.asarray(cluster, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[0] == 0:
        raise EmptyCluster("gradient update needs a nonempty cluster")
    if z not in (1, 2, 3, 4):
        raise DomainError("gradient center update covers z in {1, 2, 3, 4}")
    init = np.asarray(init, dtype=float).reshape(-1)
    if init.shape[0] != pts.shape[1]:
        raise DimensionMismatch("init dimension does not match cluster points")
    bounds = np.array([0, pts.shape[0]])
    counts = np.array([pts.shape[0]])
    best, _ = _adam_on_centers(pts, bounds, counts, init[None, :].copy(), z, opts)
    return best[0]


def _sorted_clusters(P: PointSet, labels: np.ndarray, k: int):
    order = np.argsort(labels, kind="stable")
    counts = np.bincount(labels, minlength=k)
    bounds = np.concatenate(([0], np.cumsum(counts)))
    return P.points[order], counts, bounds


def _reseed_empty_centers(P, centers, cv: CostVector, empties, z):
    """Place each empty cluster's center on the point farthest (in z-power
    distance) from its serving center; earlier picks are excluded so two
    empties never grab the same point."""
    values = cv.values.copy()
    out = centers.copy()
    for c in empties:
        pick = int(np.argmax(values))
        out[c] = P.points[pick]
        values[pick] = -np.inf
    return out


def em_center(P: PointSet, k: int, z: int, init: CenterSolution,
              opts: SolverOptions | None = None):
    """Alternate nearest-center assignment with per-cluster center updates.

    z=2 uses the cluster mean (Lloyd step); z in {1, 3, 4} uses the Adam
    update. The accept-guard keeps the old center whenever the candidate does
    not lower that cluster's cost, so the trace never increases.
    """
    opts = opts or SolverOptions()
    if init.k != k or init.d != P.d:
        raise DimensionMismatch("init must provide k centers of the data dimension")
    if z < 1:
        raise DomainError("z must be a positive integer")
    centers = init.centers.copy()
    cv, total = center_cost(P, CenterSolution(centers, z))
    trace = SolveTrace(costs=[total])
    converged = False
    for _ in range(opts.max_em_iters):
        counts = np.bincount(cv.labels, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size and opts.empty_cluster_policy == "reseed_farthest":
            centers = _reseed_empty_centers(P, centers, cv, empties, z)
            cv, total = center_cost(P, CenterSolution(centers, z))
        Ps, counts, bounds = _sorted_clusters(P, cv.labels, k)
        new_centers = centers.copy()
        if z == 2:
            for c in range(k):
                if counts[c] == 0:
                    continue
                new_centers[c] = Ps[bounds[c]:bounds[c + 1]].mean(axis=0)
        else:
            cand, _ = _adam_on_centers(Ps, bounds, counts, centers.copy(), z, opts)
            new_centers = cand
        for c in range(k):  # accept-guard, cluster by cluster
            if counts[c] == 0:
                new_centers[c] = centers[c]
                continue
            seg = Ps[bounds[c]:bounds[c + 1]]
            if _exact_cluster_cost(seg, new_centers[c], z) > \
               _exact_cluster_cost(seg, centers[c], z):
                new_centers[c] = centers[c]
        centers = new_centers
        cv, new_total = center_cost(P, CenterSolution(centers, z))
        trace.costs.append(new_total)
        trace.iterations += 1
        if new_total <= _ZERO_COST or \
           total - new_total <= opts.rel_tol * max(abs(total), 1e-300):
            converged = True
            total = new_total
            break
        total = new_total
    trace.converged = converged
    return CenterSolution(centers, z), trace


def _gd_basis(pts: np.ndarray, B0: OrthoBasis, z: int, opts: SolverOptions):
    """Projected gradient ascent on captured power-residual for one cluster.

    Steps the basis along the gradient of sum r^z (through r^2 = ||p||^2 -
    ||B^T p||^2), then re-orthonormalizes, and returns the best-seen basis.
    """
    d = pts.shape[1]
    nc = pts.shape[0]
    if B0.rank == 0:
        seed_pt = pts[int(np.argmax(np.einsum("nd,nd->n", pts, pts)))]
        if np.linalg.norm(seed_pt) < 1e-12:
            return B0
        B = (seed_pt / np.linalg.norm(seed_pt))[:, None].copy()
    else:
        B = B0.cols.copy()
    lr = opts.gd_learning_rate

    def _cost(Bc):
        R = pts - (pts @ Bc) @ Bc.T
        sq = np.einsum("nd,nd->n", R, R)
        return float(np.sum(np.sqrt(sq) ** z)), sq

    f_best, _ = _cost(B)
    B_best = B.copy()
    stall = 0
    for _ in range(opts.gd_iters):
        Y = pts @ B
        R = pts - Y @ B.T
        sq = np.einsum("nd,nd->n", R, R)
        r = np.sqrt(sq)
        w = _power_weights(r, sq, z)
        step = (lr / nc) * (pts.T @ (w[:, None] * Y))
        Bn = B + step
        cols = [Bn[:, i] for i in range(Bn.shape[1])]
        try:
            B = orthonormalize(cols).cols
        except Exception:
            break
        f, _ = _cost(B)
        if f < f_best - 1e-12 * max(f_best, 1.0):
            f_best, B_best = f, B.copy()
            stall = 0
        else:
            stall += 1
            if stall >= opts.gd_patience:
                break
    return OrthoBasis(B_best[:, :min(B_best.shape[1], d)])


def em_subspace(P: PointSet, k: int, j: int, z: int, init: SubspaceSolution,
                opts: SolverOptions | None = None):
    """Alternate nearest-subspace assignment with per-cluster basis updates.

    z=2 recomputes the top-j singular subspace of each cluster; other z take
    projected gradient steps. Accept-guarded like em_center.
    """
    opts = opts or SolverOptions()
    if init.k != k or init.d != P.d:
        raise DimensionMismatch("init must provide k bases of the data dimension")
    if not (1 <= j <= P.d):
        raise DimensionMismatch(f"need 1 <= j <= d; got j={j}")
    bases = [OrthoBasis(b.cols.copy()) for b in init.bases]
    sol = SubspaceSolution(bases, j=j, z=z)
    cv, total = subspace_cost(P, sol)
    trace = SolveTrace(costs=[total])
    converged = False
    for _ in range(opts.max_em_iters):
        counts = np.bincount(cv.labels, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size and opts.empty_cluster_policy == "reseed_farthest":
            values = cv.values.copy()
            for c in empties:
                pick = int(np.argmax(values))
                values[pick] = -np.inf
                p = P.points[pick]
                if np.linalg.norm(p) >= 1e-12:
                    bases[c] = orthonormalize([p])
            sol = SubspaceSolution(bases, j=j, z=z)
            cv, total = subspace_cost(P, sol)
            counts = np.bincount(cv.labels, minlength=k)
        Ps, counts, bounds = _sorted_clusters(P, cv.labels, k)
        new_bases = list(bases)
        for c in range(k):
            if counts[c] == 0:
                continue
            seg = Ps[bounds[c]:bounds[c + 1]]
            j_eff = min(j, seg.shape[0], P.d)
            if z == 2:
                if float(np.max(np.abs(seg))) == 0.0:
                    continue  # all-zero cluster: any basis already costs 0
                cand = top_j_singular_subspace(seg, j_eff, seed=0)
            else:
                cand = _gd_basis(seg, bases[c], z, opts)
            if _exact_subspace_cluster_cost(seg, cand, z) <= \
               _exact_subspace_cluster_cost(seg, bases[c], z):
                new_bases[c] = cand
        bases = new_bases
        sol = SubspaceSolution(bases, j=j, z=z)
        cv, new_total = subspace_cost(P, sol)
        trace.costs.append(new_total)
        trace.iterations += 1
        if new_total <= _ZERO_COST or \
           total - new_total <= opts.rel_tol * max(abs(total), 1e-300):
            converged = True
            total = new_total
            break
        total = new_total
    trace.converged = converged
    return sol, trace


# ---------------------------------------------------------------------------
# Exhaustive oracle for tiny instances


def _partitions_into_at_most(n: int, k: int):
    """All set partitions of range(n) into at most k blocks, as label lists
    in restricted-growth form (labels[0] == 0 always)."""
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i, maxi):
        if i == n:
            yield labels.copy()
            return
        for c in range(min(maxi + 1, k - 1) + 1):
            labels[i] = c
            yield from rec(i + 1, max(maxi, c))

    yield from rec(1, 0)


def _coordinate_ternary_min(pts: np.ndarray, z: int, tol: float = 1e-6):
    """Coordinate-wise ternary search for the 1-cluster center, z in {1,3,4}.

    Convex objective; each coordinate is minimized over the cluster's
    bounding box. Oracle-grade and deliberately independent of the Adam path.
    """
    lo0 = pts.min(axis=0)
    hi0 = pts.max(axis=0)
    s = pts.mean(axis=0)
    d = pts.shape[1]

    def fcoord(i, x):
        t = s.copy()
        t[i] = x
        diff = pts - t
        sq = np.einsum("nd,nd->n", diff, diff)
        return float(np.sum(np.sqrt(sq) ** z))

    for _ in range(200):
        moved = 0.0
        for i in range(d):
            lo, hi = float(lo0[i]), float(hi0[i])
            while hi - lo > tol * 1e-2:
                m1 = lo + (hi - lo) / 3.0
                m2 = hi - (hi - lo) / 3.0
                if fcoord(i, m1) <= fcoord(i, m2):
                    hi = m2
                else:
                    lo = m1
            x = 0.5 * (lo + hi)
            moved = max(moved, abs(x - s[i]))
            s[i] = x
        if moved < tol * 1e-1:
            break
    return s


def _top_j_eigh(pts: np.ndarray, j: int) -> OrthoBasis:
    """Dense-eigendecomposition top-j subspace; independent oracle route."""
    G = pts.T @ pts
    vals, vecs = np.linalg.eigh(G)
    order = np.argsort(vals)[::-1][:j]
    return orthonormalize([vecs[:, i] for i in order])


def erm_oracle_small(P: PointSet, k: int, z: int, objective: str = "center",
                     j: int | None = None):
    """Exact minimizer over all partitions of a tiny point set (n <= 10).

    Per block the 1-cluster problem is solved closed form (mean for z=2),
    by coordinate ternary search (z in {1,3,4}), or by a dense top-j
    eigendecomposition (subspace, z=2). Returns (solution, total cost).
    """
    if P.n > 10:
        raise TooLarge(f"exhaustive oracle capped at n = 10; got n = {P.n}")
    if P.n == 0:
        raise EmptyCluster("empty point set")
    if objective == "subspace":
        if j is None:
            raise DomainError("subspace oracle needs j")
        if z != 2:
            raise DomainError("subspace oracle implemented for z = 2 only")
    elif objective != "center":
        raise DomainError(f"unknown objective {objective!r}")

    best_cost = math.inf
    best_solution = None
    for labels in _partitions_into_at_most(P.n, k):
        labels = np.asarray(labels, dtype=int)
        nblocks = labels.max() + 1
        if objective == "center":
            centers = np.empty((nblocks, P.d))
            for c in range(nblocks):
                block = P.points[labels == c]
                if z == 2:
                    centers[c] = block.mean(axis=0)
                else:
                    centers[c] = _coordinate_ternary_min(block, z)
            if nblocks < k:
                centers = np.vstack([centers] + [centers[:1]] * (k - nblocks))
            sol = CenterSolution(centers, z)
            _, cost = center_cost(P, sol)
        else:
            bases = []
            for c in range(nblocks):
                block = P.points[labels == c]
                j_eff = min(j, block.shape[0], P.d)
                if float(np.max(np.abs(block))) == 0.0:
                    bases.append(OrthoBasis.empty(P.d))
                else:
                    bases.append(_top_j_eigh(block, j_eff))
            while len(bases) < k:
                bases.append(bases[0])
            sol = SubspaceSolution(bases, j=j, z=z)
            _, cost = subspace_cost(P, sol)
        if cost < best_cost:
            best_cost = cost
            best_solution = sol
    return best_solution, best_cost
