"""Adaptive projection of a point set against a target subspace, unit-ball
nets at enumeration scale, cost-vector net verification, and net-size
calculators.

The adaptive projection is the workhorse: given points P in the unit ball and
an orthonormal target U of rank j, it greedily selects input points whose
span Pi eventually satisfies ||U^T (I - Pi) p|| <= eps ||(I - Pi) p|| for
every p. Each selected point raises the potential ||U^T Pi||_F^2 by more than
eps^2, and the potential is capped at j, so at most ceil(j / eps^2) points are
ever chosen.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyNet, TooLarge
from .linalg import OrthoBasis, Projector
from .objectives import CostVector, PointSet

# Hard cap on enumerated grid candidates; (1 + 2/eps)-style nets explode fast.
_MAX_GRID_CANDIDATES = 5_000_000


@dataclass
class AdaptiveReduction:
    selected: list[int]
    projector: Projector
    rounds: int
    potential_trace: list[float]

    @property
    def size(self) -> int:
        return len(self.selected)


def adaptive_projection(P: PointSet, U: OrthoBasis, eps: float) -> AdaptiveReduction:
    """Greedy point selection until no point violates the reduction condition.

    Scans in index order and always adds the first violator, i.e. the first p
    with ||U^T (I - Pi) p|| > eps ||(I - Pi) p|| (with a 1e-12 slack so
    boundary roundoff cannot loop forever). Records the potential
    ||U^T Pi||_F^2 after every round; by the potential argument the loop stops
    after at most ceil(j / eps^2) rounds.
    """
    if not (0.0 < eps < 1.0):
        raise DomainError("eps must lie in (0, 1)")
    if U.dim != P.d:
        raise DomainError("target subspace dimension must match the points")
    j = U.rank
    pts = P.points
    cols: list[np.ndarray] = []  # orthonormal basis of span(M)
    selected: list[int] = []
    potential_trace: list[float] = []
    max_rounds = math.ceil(j / (eps * eps)) + 5  # defensive; never binding

    # Residuals maintained incrementally: res = (I - Pi) p for every p.
    res = pts.copy()
    for _ in range(max_rounds):
        u_res = res @ U.cols                     # rows: U^T (I - Pi) p
        lhs = np.sqrt(np.einsum("nj,nj->n", u_res, u_res))
        rhs = eps * np.sqrt(np.einsum("nd,nd->n", res, res))
        violators = np.flatnonzero(lhs > rhs + 1e-12)
        if violators.size == 0:
            break
        pick = int(violators[0])
        w = res[pick].copy()
        for _ in range(2):
            for u in cols:
                w -= (u @ w) * u
        nrm = np.linalg.norm(w)
        if nrm < 1e-14:
            # Numerically in the span already; its violation is roundoff.
            res[pick] = 0.0
            continue
        w /= nrm
        cols.append(w)
        selected.append(pick)
        res = res - np.outer(res @ w, w)
        basis = np.column_stack(cols)
        potential_trace.append(float(np.linalg.norm(U.cols.T @ basis) ** 2))

    basis = OrthoBasis(np.column_stack(cols)) if cols else OrthoBasis.empty(P.d)
    return AdaptiveReduction(selected=selected, projector=Projector(basis),
                             rounds=len(selected), potential_trace=potential_trace)


def reduction_bound(j: int, eps: float) -> int:
    """ceil(j / eps^2): the guaranteed cap on selected points."""
    return math.ceil(j / (eps * eps))


def unit_ball_net(d: int, eps: float) -> np.ndarray:
    """Axis-aligned grid net of the d-dimensional unit ball.

    Grid pitch eps / sqrt(d), restricted to the ball. Rounding a query toward
    the origin lands on an in-ball grid point within eps, so the grid covers.
    Guarded: enumeration only at small d / moderate eps (the candidate count
    (2*floor(sqrt(d)/eps)+1)^d must stay below five million, which any
    d <= 4, eps >= 0.2 instance does).
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    if eps <= 0.0:
        raise DomainError("eps must be positive")
    pitch = eps / math.sqrt(d)
    half = math.floor(1.0 / pitch)
    candidates = (2 * half + 1) ** d
    if d > 4 or candidates > _MAX_GRID_CANDIDATES:
        raise TooLarge(
            f"net enumeration guard: d={d}, eps={eps} would generate "
            f"{candidates} grid candidates")
    axes = [np.arange(-half, half + 1) * pitch] * d
    grid = np.array(list(itertools.product(*axes)))
    norms = np.linalg.norm(grid, axis=1)
    return grid[norms <= 1.0 + 1e-12]


def euclidean_net_size_bound(d: int, eps: float) -> float:
    """(1 + 2/eps)^d, the existential unit-ball net size."""
    return (1.0 + 2.0 / eps) ** d


@dataclass
class NetVerification:
    max_deviation: float
    eps: float
    worst_candidate: int
    worst_point: int

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.eps + 1e-12


def _as_cost_vector(P: PointSet, candidate) -> CostVector:
    from .objectives import (CenterSolution, SubspaceSolution, center_cost,
                             subspace_cost)
    if isinstance(candidate, CenterSolution):
        return center_cost(P, candidate)[0]
    if isinstance(candidate, SubspaceSolution):
        return subspace_cost(P, candidate)[0]
    return candidate


def verify_clustering_net(P: PointSet, candidates,
                          net_vectors: list[CostVector], eps: float) -> NetVerification:
    """Check that every candidate has a net vector within sup-norm eps.

    Candidates may be solutions (their cost vectors over P are computed
    here) or pre-computed cost vectors. Reports the worst candidate and the
    witness coordinate.
    """
    if not net_vectors:
        raise EmptyNet("net contains no cost vectors")
    if not candidates:
        raise DomainError("no candidates supplied")
    candidate_vectors = [_as_cost_vector(P, c) for c in candidates]
    net = np.stack([v.values for v in net_vectors])
    worst = -1.0
    worst_candidate = -1
    worst_point = -1
    for ci, cand in enumerate(candidate_vectors):
        devs = np.max(np.abs(net - cand.values[None, :]), axis=1)
        best = int(np.argmin(devs))
        if devs[best] > worst:
            worst = float(devs[best])
            worst_candidate = ci
            worst_point = int(np.argmax(np.abs(net[best] - cand.values)))
    return NetVerification(max_deviation=worst, eps=eps,
                           worst_candidate=worst_candidate, worst_point=worst_point)


def center_net_delta(eps: float, z: int) -> float:
    """Ball-net resolution that makes grid centers an eps-net of cost
    vectors: eps^2 / (4 (6z)^z)."""
    return eps * eps / (4.0 * (6.0 * z) ** z)


@dataclass
class NetSizeBound:
    kind: str
    log_size: float
    k: int
    j: int
    z: int
    eps: float
    n: int


def net_size_bound(kind: str, k: int, j: int, z: int, eps: float, n: int) -> NetSizeBound:
    """Log of the cost-vector net-size bounds, absolute constants fixed at 1.

    center:    z^3 k eps^-2 log n (log z + log eps^-1)
    subspace:  (3z)^(z+2) k j eps^-2 (log n + j log(j/eps)) log eps^-1
    Only ratios and monotonicity are meaningful; the true constants are not
    pinned down.
    """
    if min(k, j, z, n) < 1 or not (0.0 < eps < 1.0):
        raise DomainError("need k, j, z, n >= 1 and eps in (0, 1)")
    inv = 1.0 / eps
    if kind == "center":
        log_size = (z ** 3) * k * inv * inv * math.log(n) * \
            (math.log(z) + math.log(inv))
    elif kind == "subspace":
        log_size = ((3.0 * z) ** (z + 2)) * k * j * inv * inv * \
            (math.log(n) + j * math.log(j * inv)) * math.log(inv)
    else:
        raise DomainError(f"unknown net kind {kind!r}")
    return NetSizeBound(kind=kind, log_size=log_size, k=k, j=j, z=z, eps=eps, n=n)
