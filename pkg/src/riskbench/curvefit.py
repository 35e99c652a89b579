"""Least-squares fit of c * k^q1 / n^q2 to excess-risk measurements.

Gradient descent with backtracking line search in (log c, q1, q2); log-space
keeps c positive and the exponents unconstrained. Internally the log-features
are centered, which is only a reparameterization but conditions the descent
well enough that no learning-rate tuning is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Underdetermined


@dataclass
class FitResult:
    c: float
    q1: float
    q2: float
    lse: float
    iterations: int
    rows: int
    q1_frozen: bool = False

    def predict(self, k, n):
        return self.c * np.power(k, self.q1) / np.power(n, self.q2)


def fit_power_law(rows, max_iters: int = 10_000, rel_tol: float = 1e-12,
                  y_floor: float = 1e-12) -> FitResult:
    """Fit (k, n, y) rows to y ~ c * k^q1 / n^q2 by minimizing the summed
    squared error.

    Needs at least 3 rows and 2 distinct n. With a single distinct k the
    exponent q1 is not identifiable; it is frozen at 0 (k^q1 folds into c)
    and flagged on the result. y may contain non-positive entries; they only
    enter the log-space initialization through a small floor.
    """
    # Canonical row order: the loss is a plain sum, so sorting first makes the
    # result independent of how callers happened to order their rows.
    data = sorted((float(k), float(n), float(y)) for (k, n, y) in rows)
    if len(data) < 3:
        raise Underdetermined("need at least 3 rows")
    ks = np.array([r[0] for r in data])
    ns = np.array([r[1] for r in data])
    ys = np.array([r[2] for r in data])
    if len(np.unique(ns)) < 2:
        raise Underdetermined("need at least 2 distinct n values")
    q1_frozen = len(np.unique(ks)) < 2

    lnk = np.log(ks)
    lnn = np.log(ns)
    mk = float(lnk.mean())
    mn = float(lnn.mean())
    fk = lnk - mk
    fn = lnn - mn

    q1 = 0.0 if q1_frozen else 0.5
    q2 = 0.5
    # Log-space init from the positive rows only; zero/negative rows would
    # otherwise drag the floored median into a flat region of the loss.
    pos = ys > 0.0
    ly = np.log(ys[pos]) if np.any(pos) else np.log(np.full(1, y_floor))
    L = float(np.median(ly - q1 * fk[pos] + q2 * fn[pos])) if np.any(pos) \
        else float(np.log(y_floor))
    theta = np.array([L, q1, q2])

    def loss_and_grad(th):
        model = np.exp(th[0] + th[1] * fk - th[2] * fn)
        resid = model - ys
        lse = float(resid @ resid)
        common = 2.0 * resid * model
        g = np.array([common.sum(),
                      0.0 if q1_frozen else float(common @ fk),
                      -float(common @ fn)])
        return lse, g

    lse, grad = loss_and_grad(theta)
    init_lse = lse
    best_theta = theta.copy()
    best_lse = lse
    step = 1.0
    iterations = 0
    for iterations in range(1, max_iters + 1):
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            break
        accepted = False
        while step > 1e-18:
            cand = theta - step * grad
            cand_lse, cand_grad = loss_and_grad(cand)
            if cand_lse < lse:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        improvement = lse - cand_lse
        theta, lse, grad = cand, cand_lse, cand_grad
        if lse < best_lse:
            best_lse, best_theta = lse, theta.copy()
        step *= 2.0
        if improvement <= rel_tol * max(lse, 1e-300):
            break

    th = best_theta
    c = math.exp(th[0] - th[1] * mk + th[2] * mn)
    assert best_lse <= init_lse + 1e-12
    return FitResult(c=c, q1=float(th[1]), q2=float(th[2]), lse=best_lse,
                     iterations=iterations, rows=len(data), q1_frozen=q1_frozen)
