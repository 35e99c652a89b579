"""Dense linear-algebra kernels used everywhere else.

Orthonormal bases, projections onto point spans, top singular subspaces via
power iteration on the Gram matrix, and the five-term split of a squared
subspace residual across a second projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZero, DimensionMismatch, NoConvergence

# Residual threshold under which a vector is considered dependent and dropped
# during Gram-Schmidt elimination.
DROP_TOL = 1e-10
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class OrthoBasis:
    """Orthonormal columns spanning a subspace of R^d.

    ``cols`` has shape (d, rank). rank == 0 encodes the trivial subspace {0}.
    """

    cols: np.ndarray

    @property
    def dim(self) -> int:
        return self.cols.shape[0]

    @property
    def rank(self) -> int:
        return self.cols.shape[1]

    def coeffs(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of x in the basis, i.e. B^T x."""
        return self.cols.T @ x

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection B B^T x onto the spanned subspace."""
        if self.rank == 0:
            return np.zeros_like(x)
        return self.cols @ (self.cols.T @ x)

    def orthonormality_defect(self) -> float:
        """max |B^T B - I|; should be < 1e-8 for any basis we hand out."""
        if self.rank == 0:
            return 0.0
        g = self.cols.T @ self.cols
        return float(np.max(np.abs(g - np.eye(self.rank))))

    @staticmethod
    def empty(d: int) -> "OrthoBasis":
        return OrthoBasis(np.zeros((d, 0)))

    @staticmethod
    def standard(d: int, j: int) -> "OrthoBasis":
        return OrthoBasis(np.eye(d)[:, :j].copy())


@dataclass(frozen=True)
class Projector:
    """Orthogonal projection Pi = B B^T, stored via an orthonormal basis."""

    basis: OrthoBasis

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def rank(self) -> int:
        return self.basis.rank

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.basis.project(x)

    def complement_apply(self, x: np.ndarray) -> np.ndarray:
        return x - self.basis.project(x)

    def matrix(self) -> np.ndarray:
        if self.rank == 0:
            return np.zeros((self.dim, self.dim))
        b = self.basis.cols
        return b @ b.T

    @staticmethod
    def zero(d: int) -> "Projector":
        return Projector(OrthoBasis.empty(d))

    @staticmethod
    def identity(d: int) -> "Projector":
        return Projector(OrthoBasis.standard(d, d))


def orthonormalize(vectors) -> OrthoBasis:
    """Orthonormal basis of span(vectors) by modified Gram-Schmidt.

    Each vector is orthogonalized twice against the accepted columns
    (re-orthogonalization pass) before the drop test, so near-dependent
    inputs are eliminated stably. Vectors whose residual norm falls below
    ``DROP_TOL`` are dropped.

    Raises AllZero when every input has norm below ``ZERO_TOL`` (or nothing
    survives elimination).
    """
    arrs = [np.asarray(v, dtype=float).reshape(-1) for v in vectors]
    if not arrs:
        raise AllZero("no input vectors")
    d = arrs[0].shape[0]
    for v in arrs:
        if v.shape[0] != d:
            raise DimensionMismatch(f"vector of dim {v.shape[0]} among dim-{d} inputs")
    if all(np.linalg.norm(v) < ZERO_TOL for v in arrs):
        raise AllZero("all input vectors are (numerically) zero")

    cols: list[np.ndarray] = []
    for v in arrs:
        w = v.copy()
        for _ in range(2):
            for u in cols:
                w -= (u @ w) * u
        nrm = np.linalg.norm(w)
        if nrm < DROP_TOL:
            continue
        cols.append(w / nrm)
        if len(cols) == d:
            break
    if not cols:
        raise AllZero("every vector eliminated as dependent/zero")
    return OrthoBasis(np.column_stack(cols))


def project_residual(p, basis: OrthoBasis):
    """Residual of p against the basis: (p - B B^T p, its Euclidean norm)."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape[0] != basis.dim:
        raise DimensionMismatch(f"point dim {p.shape[0]} != basis dim {basis.dim}")
    residual = p - basis.project(p)
    return residual, float(np.linalg.norm(residual))


def top_j_singular_subspace(A, j: int, tol: float = 1e-10,
                            max_iter: int = 10_000, seed: int = 0) -> OrthoBasis:
    """Rank-j orthonormal basis maximizing ||A U||_F^2.

    Power iteration with deflation on the Gram matrix A^T A (d x d), which is
    cheap for the tall matrices we see (n can dwarf d). Start vectors come
    from ``seed``, so the routine is deterministic. Exhausted spectrum
    (zero deflated matrix) is padded with arbitrary orthonormal completions
    so the result always has exactly j columns.

    Raises NoConvergence if the Rayleigh quotient of some component still
    moves by a relative ``tol`` after ``max_iter`` iterations.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionMismatch("A must be a 2-d array")
    n, d = A.shape
    if not (1 <= j <= min(n, d)):
        raise DimensionMismatch(f"need 1 <= j <= min(n, d); got j={j}, shape={A.shape}")
    rng = np.random.default_rng(seed)
    G = A.T @ A
    scale = float(np.max(np.abs(G))) if G.size else 0.0
    cols: list[np.ndarray] = []

    def _orth(v):
        for _ in range(2):
            for u in cols:
                v = v - (u @ v) * u
        return v

    # Anything this far below the original spectrum is treated as kernel;
    # deflation roundoff lives around scale * 1e-15.
    floor = max(scale, 1e-30) * 1e-13
    for _ in range(j):
        v = _orth(rng.normal(size=d))
        nrm = np.linalg.norm(v)
        if nrm < ZERO_TOL:  # pathological start; use a basis sweep
            for i in range(d):
                v = _orth(np.eye(d)[:, i])
                nrm = np.linalg.norm(v)
                if nrm >= ZERO_TOL:
                    break
        v /= np.linalg.norm(v)
        if scale == 0.0 or float(np.max(np.abs(G))) <= floor:
            cols.append(v)  # spectrum exhausted: orthonormal completion
            continue
        lam = float(v @ (G @ v))
        converged = False
        for _ in range(max_iter):
            w = G @ v
            wn = np.linalg.norm(w)
            if wn <= floor:
                lam = 0.0  # v is (numerically) in the kernel; eigenvalue 0
                converged = True
                break
            v = _orth(w / wn)
            vn = np.linalg.norm(v)
            if vn < ZERO_TOL:
                lam = 0.0
                converged = True
                break
            v /= vn
            new_lam = float(v @ (G @ v))
            if abs(new_lam - lam) <= tol * max(abs(new_lam), 1e-30):
                lam = new_lam
                converged = True
                break
            lam = new_lam
        if not converged:
            raise NoConvergence(max_iter, "power iteration did not stabilize")
        cols.append(v)
        if lam > 0.0:
            G = G - lam * np.outer(v, v)
    basis = OrthoBasis(np.column_stack(cols))
    # One strict re-orthonormalization pass; deflation can leave ~1e-9 drift.
    return orthonormalize([basis.cols[:, i] for i in range(basis.rank)])


def decomposition_terms(p, U: OrthoBasis, Pi: Projector):
    """Five-term split of ||(I - U U^T) p||^2 across the projector Pi.

    Returns (t1, t2, t3, t4, t5) with
        t1 = ||Pi p||^2
        t2 = ||U^T Pi p||^2
        t3 = ||(I - Pi) p||^2
        t4 = ||U U^T (I - Pi) p||^2
        t5 = 2 p^T Pi U U^T (Pi - I) p
    and the guarantee t1 - t2 + t3 - t4 + t5 == ||(I - U U^T) p||^2 up to
    1e-9. Note the cross term t5 carries the sign that makes the identity
    hold; writing it with (I - Pi) instead of (Pi - I) breaks it.
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape[0] != U.dim or p.shape[0] != Pi.dim:
        raise DimensionMismatch("p, U and Pi must share one ambient dimension")
    a = Pi.apply(p)          # Pi p
    b = p - a                # (I - Pi) p
    ua = U.coeffs(a)
    ub = U.coeffs(b)
    t1 = float(a @ a)
    t2 = float(ua @ ua)
    t3 = float(b @ b)
    t4 = float(ub @ ub)      # ||U U^T b||^2 == ||U^T b||^2
    t5 = float(-2.0 * (ua @ ub))
    return t1, t2, t3, t4, t5
