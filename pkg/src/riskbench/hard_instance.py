"""Axis-supported hard distribution for subspace clustering: construction,
sampling, exact ERM, analytic optimum, and excess-risk scaling runs.

The distribution lives on the 2kj standard basis vectors of R^(2kj): the
first kj axes ("good") carry mass p each, the rest ("bad") carry p(1-eps).
Any k rank-j solution can absorb at most kj axes, so the optimal
distributional cost is the total bad mass kj p (1-eps), and the ERM on a
sample simply keeps the kj empirically heaviest axes. Every selected bad
axis displaces one good axis and contributes exactly p*eps of excess, which
makes the excess measurable without any optimization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .objectives import PointSet
from .riskcurve import RiskRow
from .seeding import make_rng


@dataclass
class HardInstance:
    k: int
    j: int
    eps: float
    d: int
    p: float
    masses: np.ndarray

    @property
    def good(self) -> int:
        """Number of high-mass axes (= kj)."""
        return self.k * self.j


def build_hard_instance(k: int, j: int, eps: float) -> HardInstance:
    """Masses p on the first kj axes and p(1-eps) on the remaining kj, with
    p = 1 / (kj (2 - eps)) so everything sums to one."""
    if k < 1 or j < 1:
        raise DomainError("need k, j >= 1")
    if not (0.0 <= eps < 1.0):
        raise DomainError("need 0 <= eps < 1")
    kj = k * j
    p = 1.0 / (kj * (2.0 - eps))
    masses = np.concatenate([np.full(kj, p), np.full(kj, p * (1.0 - eps))])
    return HardInstance(k=k, j=j, eps=eps, d=2 * kj, p=p, masses=masses)


def analytic_opt(inst: HardInstance) -> float:
    """Distributional optimum: the total mass of the bad axes, kj p (1-eps)."""
    return inst.good * inst.p * (1.0 - inst.eps)


def sample_hard(inst: HardInstance, n: int, rng: np.random.Generator):
    """n independent draws as a multinomial over the axes. Returns the
    realized point set (axis vectors, grouped) and the count per axis."""
    if n < 1:
        raise DomainError("need n >= 1")
    counts = rng.multinomial(n, inst.masses)
    points = np.repeat(np.eye(inst.d), counts, axis=0)
    return PointSet(points, name=f"hard(k={inst.k},j={inst.j},eps={inst.eps})"), counts


@dataclass
class HardERM:
    chosen_axes: np.ndarray
    dist_cost: float
    excess: float
    b_ex: int
    sample_cost: float


def erm_hard(inst: HardInstance, counts) -> HardERM:
    """Exact empirical risk minimizer: keep the kj axes with the largest
    empirical counts (ties prefer good axes, then lower index).

    The tie-break makes the measured excess a lower bound on the adversarial
    one. Excess over the distribution equals p * eps * (#selected bad axes)
    by the mass accounting above.
    """
    counts = np.asarray(counts)
    if counts.shape != (inst.d,):
        raise DomainError(f"counts must have length d = {inst.d}")
    kj = inst.good
    is_bad = (np.arange(inst.d) >= kj).astype(int)
    order = np.lexsort((np.arange(inst.d), is_bad, -counts))
    chosen = np.sort(order[:kj])
    b_ex = int(np.sum(chosen >= kj))
    unsel = np.ones(inst.d, dtype=bool)
    unsel[chosen] = False
    dist_cost = math.fsum(inst.masses[unsel].tolist())
    n = int(counts.sum())
    sample_cost = float(counts[unsel].sum()) / n if n else 0.0
    return HardERM(chosen_axes=chosen, dist_cost=dist_cost,
                   excess=dist_cost - analytic_opt(inst), b_ex=b_ex,
                   sample_cost=sample_cost)


def hard_scaling_experiment(k: int, j: int, eps_grid, n_grid, repeats: int,
                            seed: int) -> list[RiskRow]:
    """Excess-risk rows over an (eps, n, repeat) grid, one hard instance per
    eps. Each repeat draws a fresh sample and solves the ERM exactly."""
    if not len(eps_grid) or not len(n_grid):
        raise DomainError("grids must be nonempty")
    rows: list[RiskRow] = []
    for ei, eps in enumerate(eps_grid):
        inst = build_hard_instance(k, j, eps)
        for n in n_grid:
            for rep in range(repeats):
                rng = make_rng(seed, ei, int(n), rep)
                _, counts = sample_hard(inst, int(n), rng)
                erm = erm_hard(inst, counts)
                rows.append(RiskRow(
                    dataset=f"hard(k={k},j={j},eps={eps:g})", objective="subspace",
                    z=2, j=j, k=k, n=int(n), repeat=rep,
                    seed=seed, sample_cost=erm.sample_cost,
                    full_cost=erm.dist_cost, excess=erm.excess))
    return rows


def sensitivity_eps(k: int, j: int, n_grid) -> float:
    """Midpoint of the sqrt(kj/n) rate range over the grid.

    This places the miscount transition inside the grid without letting the
    small-n rows saturate, which is what makes the fitted n-exponent land
    near the true 1/2. (The geometric midpoint of n itself puts eps so low
    that the front of the grid flattens and the fit under-reads the rate.)
    """
    lo = math.sqrt(k * j / float(max(n_grid)))
    hi = math.sqrt(k * j / float(min(n_grid)))
    return 0.5 * (lo + hi)
