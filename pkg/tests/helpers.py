"""Shared test helpers: independent oracles and random generators."""

import numpy as np

from riskbench import OrthoBasis, orthonormalize


def jacobi_eigh(A, sweeps=100, tol=1e-13):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Deliberately independent of the power-iteration code under test; used as
    the dense-eigendecomposition oracle.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
    return np.diag(A).copy(), V


def random_in_ball(rng, n, d, radius=1.0):
    pts = rng.standard_normal((n, d))
    norms = np.linalg.norm(pts, axis=1)
    scale = radius * rng.uniform(0.0, 1.0, n) ** (1.0 / d) / np.maximum(norms, 1e-12)
    return pts * scale[:, None]


def random_basis(rng, d, j) -> OrthoBasis:
    return orthonormalize([rng.standard_normal(d) for _ in range(j)])
