import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskbench import (OrthoBasis, Projector, decomposition_terms, make_rng,
                       orthonormalize, project_residual,
                       top_j_singular_subspace)
from riskbench.errors import AllZero, DimensionMismatch

from helpers import jacobi_eigh, random_basis, random_in_ball


def e(i, d):
    v = np.zeros(d)
    v[i] = 1.0
    return v


class TestOrthonormalize:
    def test_already_orthonormal_passthrough(self):
        basis = orthonormalize([e(0, 3), e(1, 3)])
        assert basis.rank == 2
        assert np.allclose(basis.cols, np.eye(3)[:, :2])

    def test_dependent_vector_dropped(self):
        basis = orthonormalize([e(0, 3), 2.0 * e(0, 3)])
        assert basis.rank == 1
        assert np.allclose(np.abs(basis.cols[:, 0]), e(0, 3))

    def test_random_vectors_span_and_gram(self, rng):
        vecs = [rng.standard_normal(8) for _ in range(5)]
        basis = orthonormalize(vecs)
        assert basis.rank == 5
        # explicit Gram-matrix oracle
        gram = basis.cols.T @ basis.cols
        assert np.max(np.abs(gram - np.eye(5))) < 1e-8
        for v in vecs:
            assert np.linalg.norm(v - basis.project(v)) < 1e-8

    def test_all_zero_raises(self):
        with pytest.raises(AllZero):
            orthonormalize([np.zeros(4), 1e-13 * np.ones(4)])

    def test_rank_capped_at_dimension(self, rng):
        basis = orthonormalize([rng.standard_normal(3) for _ in range(6)])
        assert basis.rank <= 3
        assert basis.orthonormality_defect() < 1e-8


class TestProjectResidual:
    def test_orthogonal_direction_untouched(self):
        basis = orthonormalize([e(0, 3)])
        residual, norm = project_residual(e(1, 3), basis)
        assert np.allclose(residual, e(1, 3))
        assert norm == pytest.approx(1.0)

    def test_in_span_vanishes(self, rng):
        basis = random_basis(rng, 6, 2)
        p = basis.cols @ rng.standard_normal(2)
        _, norm = project_residual(p, basis)
        assert norm < 1e-10

    def test_axis_decomposition(self):
        basis = orthonormalize([e(0, 2)])
        residual, norm = project_residual(np.array([0.6, 0.8]), basis)
        assert np.allclose(residual, [0.0, 0.8])
        assert norm == pytest.approx(0.8)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            project_residual(np.ones(4), orthonormalize([e(0, 3)]))

    def test_pythagoras_random_sweep(self, rng):
        for _ in range(300):
            d = int(rng.integers(2, 12))
            j = int(rng.integers(1, d + 1))
            basis = random_basis(rng, d, j)
            p = rng.standard_normal(d)
            residual, norm = project_residual(p, basis)
            proj = basis.project(p)
            assert abs(p @ p - (proj @ proj + norm * norm)) < 1e-9
            assert np.max(np.abs(basis.cols.T @ residual)) < 1e-8


class TestTopJSingularSubspace:
    def test_dominant_axis(self):
        A = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        basis = top_j_singular_subspace(A, 1, tol=1e-14)
        # A^T A = diag(2, 1): the top direction is +-e1
        assert abs(abs(basis.cols[0, 0]) - 1.0) < 1e-6
        assert abs(basis.cols[1, 0]) < 1e-5
        assert np.linalg.norm(A @ basis.cols) ** 2 == pytest.approx(2.0, abs=1e-9)

    def test_diagonal_picks_largest_axes(self):
        A = np.diag([3.0, 0.5, 2.0, 1.0])
        basis = top_j_singular_subspace(A, 2)
        span = np.abs(basis.cols.T @ np.eye(4))  # |components on axes|
        assert span[:, 0].max() > 1 - 1e-7  # axis 0 captured
        assert span[:, 2].max() > 1 - 1e-7  # axis 2 captured

    def test_energy_matches_jacobi_oracle(self, rng):
        A = rng.standard_normal((6, 4))
        basis = top_j_singular_subspace(A, 2)
        energy = np.linalg.norm(A @ basis.cols) ** 2
        vals, _ = jacobi_eigh(A.T @ A)
        expected = np.sort(vals)[::-1][:2].sum()
        assert energy == pytest.approx(expected, rel=1e-6)

    def test_row_permutation_invariance(self, rng):
        A = rng.standard_normal((12, 5))
        perm = rng.permutation(12)
        b1 = top_j_singular_subspace(A, 3)
        b2 = top_j_singular_subspace(A[perm], 3)
        e1_ = np.linalg.norm(A @ b1.cols) ** 2
        e2_ = np.linalg.norm(A[perm] @ b2.cols) ** 2
        assert e1_ == pytest.approx(e2_, rel=1e-6)

    def test_rank_deficient_padded_to_j(self):
        A = np.outer(np.ones(5), np.array([1.0, 2.0, 0.0]))
        basis = top_j_singular_subspace(A, 3)
        assert basis.rank == 3
        assert basis.orthonormality_defect() < 1e-8
        assert np.linalg.norm(A @ basis.cols) ** 2 == pytest.approx(
            np.linalg.norm(A) ** 2, rel=1e-9)

    def test_bad_j_rejected(self, rng):
        with pytest.raises(DimensionMismatch):
            top_j_singular_subspace(rng.standard_normal((3, 4)), 4)

    def test_no_convergence_raises_with_iteration_count(self, rng):
        from riskbench.errors import NoConvergence
        A = rng.standard_normal((8, 6))
        with pytest.raises(NoConvergence) as err:
            top_j_singular_subspace(A, 2, tol=0.0, max_iter=3)
        assert err.value.iterations == 3


class TestDecompositionTerms:
    def test_identity_projector(self, rng):
        d = 6
        U = random_basis(rng, d, 2)
        p = rng.standard_normal(d)
        t1, t2, t3, t4, t5 = decomposition_terms(p, U, Projector.identity(d))
        assert t3 == pytest.approx(0.0, abs=1e-12)
        assert t4 == pytest.approx(0.0, abs=1e-12)
        assert t5 == pytest.approx(0.0, abs=1e-12)
        direct = np.linalg.norm(p - U.project(p)) ** 2
        assert t1 - t2 == pytest.approx(direct, abs=1e-9)

    def test_zero_projector(self, rng):
        d = 6
        U = random_basis(rng, d, 2)
        p = rng.standard_normal(d)
        t1, t2, t3, t4, t5 = decomposition_terms(p, U, Projector.zero(d))
        assert t1 == t2 == t5 == 0.0
        direct = np.linalg.norm(p - U.project(p)) ** 2
        assert t3 - t4 == pytest.approx(direct, abs=1e-9)

    def test_identity_on_random_triples(self, rng):
        for _ in range(1000):
            d = int(rng.integers(2, 11))
            j = int(rng.integers(1, min(3, d) + 1))
            r = int(rng.integers(0, d + 1))
            U = random_basis(rng, d, j)
            Pi = Projector(random_basis(rng, d, r)) if r else Projector.zero(d)
            p = random_in_ball(rng, 1, d)[0]
            t1, t2, t3, t4, t5 = decomposition_terms(p, U, Pi)
            direct = float(np.linalg.norm(p - U.project(p)) ** 2)
            assert abs((t1 - t2 + t3 - t4 + t5) - direct) < 1e-9

    def test_dimension_mismatch(self, rng):
        U = random_basis(rng, 4, 2)
        with pytest.raises(DimensionMismatch):
            decomposition_terms(np.ones(5), U, Projector.zero(4))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2 ** 31 - 1))
def test_projector_idempotent(d, seed):
    rng = make_rng(seed)
    j = int(rng.integers(1, d + 1))
    Pi = Projector(random_basis(rng, d, j)).matrix()
    assert np.max(np.abs(Pi @ Pi - Pi)) < 1e-8
    assert np.linalg.matrix_rank(Pi, tol=1e-6) == j
