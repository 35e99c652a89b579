"""Clustering objectives: per-point cost vectors, totals, and numeric bound
checkers for the power-triangle inequalities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError
from .linalg import OrthoBasis

IN_BALL_TOL = 1e-9

# Row-block size for the exact pairwise-difference path; keeps the (block, k, d)
# temporary bounded without changing any per-pair arithmetic.
_BLOCK = 4096


def powered_from_sq(sq, z: int):
    """dist^z from squared distances, via explicit products for z <= 4 so the
    arithmetic is identical between vectorized and scalar recomputations
    (libm pow is not)."""
    if z == 2:
        return sq
    r = np.sqrt(sq)
    if z == 1:
        return r
    if z == 3:
        return sq * r
    if z == 4:
        return sq * sq
    return r ** z


@dataclass
class PointSet:
    """n points in the d-dimensional unit ball, stored row-major."""

    points: np.ndarray
    name: str = ""
    normalization: dict | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise DimensionMismatch("points must be an (n, d) array")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def max_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.points, axis=1))) if self.n else 0.0

    def validate_in_ball(self, tol: float = IN_BALL_TOL) -> bool:
        return self.max_norm() <= 1.0 + tol


@dataclass
class CenterSolution:
    """k candidate centers for (k, z) clustering."""

    centers: np.ndarray
    z: int = 2

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float)
        if self.centers.ndim != 2:
            raise DimensionMismatch("centers must be a (k, d) array")

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def d(self) -> int:
        return self.centers.shape[1]

    def clamped_to_ball(self) -> "CenterSolution":
        """Radially clamp centers to the unit ball (harness outputs only;
        never applied mid-optimization)."""
        norms = np.linalg.norm(self.centers, axis=1)
        scale = np.where(norms > 1.0, 1.0 / np.maximum(norms, 1e-300), 1.0)
        return CenterSolution(self.centers * scale[:, None], self.z)


@dataclass
class SubspaceSolution:
    """k orthonormal bases of rank at most j for (k, j, z) clustering."""

    bases: list[OrthoBasis]
    j: int
    z: int = 2

    @property
    def k(self) -> int:
        return len(self.bases)

    @property
    def d(self) -> int:
        return self.bases[0].dim

    def validate(self, tol: float = 1e-8) -> bool:
        return all(b.rank <= self.j and b.orthonormality_defect() < tol
                   for b in self.bases)


@dataclass
class CostVector:
    """Per-point costs plus the index of the serving center/subspace.

    Ties in the minimum go to the lowest index.
    """

    values: np.ndarray
    labels: np.ndarray

    def total(self) -> float:
        # Exact compensated summation: permutation invariant and reproducible.
        return math.fsum(self.values.tolist())


def center_cost(P: PointSet, S: CenterSolution):
    """Cost vector and total for (k, z) clustering.

    values[p] = min_s ||p - s||^z, computed from the explicit per-pair
    difference so a naive double loop reproduces it bit for bit.
    """
    if P.d != S.d:
        raise DimensionMismatch(f"points dim {P.d} != centers dim {S.d}")
    z = S.z
    if z < 1:
        raise DomainError("z must be a positive integer")
    n = P.n
    values = np.empty(n)
    labels = np.empty(n, dtype=np.int64)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        diff = P.points[lo:hi, None, :] - S.centers[None, :, :]
        sq = np.einsum("nkd,nkd->nk", diff, diff)
        # einsum sums over d in index order like a scalar loop would
        lab = np.argmin(sq, axis=1)
        best_sq = sq[np.arange(hi - lo), lab]
        values[lo:hi] = powered_from_sq(best_sq, z)
        labels[lo:hi] = lab
    cv = CostVector(values, labels)
    return cv, cv.total()


def subspace_cost(P: PointSet, U: SubspaceSolution):
    """Cost vector and total for (k, j, z) clustering.

    Residuals are formed explicitly as p - B B^T p per basis; the squared-norm
    shortcut loses too much precision for points close to a subspace.
    A rank-0 basis prices every point at ||p||^z.
    """
    if P.d != U.d:
        raise DimensionMismatch(f"points dim {P.d} != bases dim {U.d}")
    z = U.z
    if z < 1:
        raise DomainError("z must be a positive integer")
    res_sq = np.empty((P.n, U.k))
    for i, b in enumerate(U.bases):
        if b.dim != P.d:
            raise DimensionMismatch("basis dimension mismatch")
        if b.rank == 0:
            R = P.points
        else:
            R = P.points - (P.points @ b.cols) @ b.cols.T
        res_sq[:, i] = np.einsum("nd,nd->n", R, R)
    labels = np.argmin(res_sq, axis=1)
    best = res_sq[np.arange(P.n), labels]
    values = powered_from_sq(best, z)
    cv = CostVector(values, labels.astype(np.int64))
    return cv, cv.total()


# ---------------------------------------------------------------------------
# Numeric bound checkers


@dataclass
class BoundCheck:
    name: str
    applicable: bool
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def satisfied(self) -> bool:
        return (not self.applicable) or self.lhs <= self.rhs + 1e-12


@dataclass
class BoundReport:
    a: float
    b: float
    z: int
    eps: float
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.checks)

    def violated(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.satisfied]


def triangle_power_bounds(dab: float, dac: float, dbc: float, z: int, eps: float):
    """The two power triangle inequalities for a distance triple.

    Returns (upper, diff) BoundChecks for
        dab^z <= (1+eps)^(z-1) dac^z + ((1+eps)/eps)^(z-1) dbc^z
        |dab^z - dac^z| <= eps dac^z + ((2z+eps)/eps)^(z-1) dbc^z
    """
    up = BoundCheck(
        "triangle_power_upper", True, dab ** z,
        (1.0 + eps) ** (z - 1) * dac ** z + ((1.0 + eps) / eps) ** (z - 1) * dbc ** z)
    diff = BoundCheck(
        "triangle_power_diff", True, abs(dab ** z - dac ** z),
        eps * dac ** z + ((2.0 * z + eps) / eps) ** (z - 1) * dbc ** z)
    return up, diff


def power_bound_check(a: float, b: float, z: int, eps: float) -> BoundReport:
    """Evaluate the power-distance bounds on a scalar pair.

    The two triangle inequalities are instantiated on the collinear triple
    (0, a, b), whose pairwise distances are (a, b, |a - b|). On top of that,
    when the squared-value hypotheses hold, the derived implications are
    checked:
      * |a^2 - b^2| <= eps*b  implies  |a - b| <= eps
                              and      |a^z - b^z| <= 2 (3z)^z eps
      * |a^2 - b^2| <= max(eps*b, eps^2) / (4 (3z)^z)  implies
                              |a^z - b^z| <= eps
    Inapplicable implications are reported with applicable=False.
    """
    if not (0.0 <= a <= 2.0 and 0.0 <= b <= 2.0):
        raise DomainError(f"a, b must lie in [0, 2]; got a={a}, b={b}")
    if eps <= 0.0:
        raise DomainError("eps must be positive")
    if z < 1:
        raise DomainError("z must be a positive integer")

    report = BoundReport(a, b, z, eps)
    up, diff = triangle_power_bounds(abs(a - b), a, b, z, eps)
    report.checks.extend([up, diff])

    gap = abs(a * a - b * b)
    hyp_tol = 1e-12 * (1.0 + b)
    scale = 2.0 * (3.0 * z) ** z

    hyp_plain = gap <= eps * b + hyp_tol
    report.checks.append(BoundCheck("sq_hyp_abs_diff", hyp_plain, abs(a - b), eps))
    report.checks.append(BoundCheck("sq_hyp_power_diff", hyp_plain,
                                    abs(a ** z - b ** z), scale * eps))

    hyp_scaled = gap <= max(eps * b, eps * eps) / (2.0 * scale) + hyp_tol
    report.checks.append(BoundCheck("scaled_hyp_power_diff", hyp_scaled,
                                    abs(a ** z - b ** z), eps))
    return report
