import itertools
import math

import numpy as np
import pytest

from riskbench import (analytic_opt, build_hard_instance, erm_hard,
                       hard_scaling_experiment, make_rng, sample_hard)
from riskbench.errors import DomainError
from riskbench.hard_instance import sensitivity_eps


def brute_force_axis_opt(inst):
    """Minimum distribution cost over all axis subsets of size kj."""
    kj = inst.good
    best = math.inf
    for chosen in itertools.combinations(range(inst.d), kj):
        mask = np.ones(inst.d, dtype=bool)
        mask[list(chosen)] = False
        best = min(best, float(inst.masses[mask].sum()))
    return best


def brute_force_erm_cost(inst, counts):
    """Minimum empirical (unselected count) cost over all axis subsets."""
    kj = inst.good
    best = math.inf
    for chosen in itertools.combinations(range(inst.d), kj):
        mask = np.ones(inst.d, dtype=bool)
        mask[list(chosen)] = False
        best = min(best, int(counts[mask].sum()))
    return best


class TestBuildHardInstance:
    def test_symmetric_base_case(self):
        inst = build_hard_instance(1, 1, 0.0)
        assert inst.d == 2
        assert inst.p == pytest.approx(0.5)
        assert np.allclose(inst.masses, [0.5, 0.5])

    def test_k2_j1_eps01(self):
        inst = build_hard_instance(2, 1, 0.1)
        assert inst.d == 4
        assert inst.p == pytest.approx(1.0 / (2.0 * 1.9))
        assert inst.p == pytest.approx(0.263158, abs=1e-6)
        assert np.allclose(inst.masses,
                           [inst.p, inst.p, 0.9 * inst.p, 0.9 * inst.p])

    def test_masses_always_sum_to_one(self):
        rng = make_rng(71)
        for _ in range(50):
            k = int(rng.integers(1, 5))
            j = int(rng.integers(1, 4))
            eps = float(rng.uniform(0.0, 0.99))
            inst = build_hard_instance(k, j, eps)
            assert abs(math.fsum(inst.masses.tolist()) - 1.0) < 1e-12
            # p = 1/(kj (2 - eps)) lives in [1/d, 2/d) with d = 2kj
            assert 1.0 / inst.d <= inst.p < 2.0 / inst.d

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            build_hard_instance(0, 1, 0.1)
        with pytest.raises(DomainError):
            build_hard_instance(1, 1, 1.0)


class TestAnalyticOpt:
    def test_base_case_half(self):
        inst = build_hard_instance(1, 1, 0.0)
        assert analytic_opt(inst) == pytest.approx(0.5)
        assert brute_force_axis_opt(inst) == pytest.approx(0.5)

    def test_k2_value_and_brute_force(self):
        inst = build_hard_instance(2, 1, 0.1)
        assert analytic_opt(inst) == pytest.approx(2 * inst.p * 0.9)
        assert analytic_opt(inst) == pytest.approx(0.473684, abs=1e-6)
        assert analytic_opt(inst) == pytest.approx(brute_force_axis_opt(inst))

    @pytest.mark.parametrize("k,j", [(1, 1), (1, 2), (2, 1), (3, 1), (1, 3)])
    @pytest.mark.parametrize("eps", [0.0, 0.1, 0.5])
    def test_matches_subset_enumeration(self, k, j, eps):
        inst = build_hard_instance(k, j, eps)
        assert analytic_opt(inst) == pytest.approx(brute_force_axis_opt(inst),
                                                   abs=1e-12)

    def test_opt_linear_in_one_minus_eps(self):
        inst = build_hard_instance(2, 2, 0.999)
        assert analytic_opt(inst) == pytest.approx(4 * inst.p * 0.001)


class TestSampleHard:
    def test_single_draw(self):
        inst = build_hard_instance(2, 1, 0.2)
        _, counts = sample_hard(inst, 1, make_rng(72))
        assert counts.sum() == 1
        assert np.count_nonzero(counts) == 1

    def test_counts_concentrate_when_symmetric(self):
        inst = build_hard_instance(2, 2, 0.0)
        n = 80_000
        _, counts = sample_hard(inst, n, make_rng(73))
        expect = n / inst.d
        sigma = math.sqrt(n * (1.0 / inst.d) * (1.0 - 1.0 / inst.d))
        assert np.all(np.abs(counts - expect) <= 5.0 * sigma)

    def test_points_are_axis_vectors(self):
        inst = build_hard_instance(1, 2, 0.3)
        P, counts = sample_hard(inst, 50, make_rng(74))
        assert P.n == 50
        assert np.all(np.sum(P.points, axis=1) == 1.0)
        assert np.all(np.max(P.points, axis=1) == 1.0)

    def test_seeded_determinism(self):
        inst = build_hard_instance(2, 1, 0.1)
        _, a = sample_hard(inst, 500, make_rng(75))
        _, b = sample_hard(inst, 500, make_rng(75))
        assert np.array_equal(a, b)


class TestErmHard:
    def test_all_mass_on_good_axes(self):
        inst = build_hard_instance(2, 1, 0.2)
        erm = erm_hard(inst, np.array([5, 7, 0, 0]))
        assert erm.b_ex == 0
        assert erm.excess == pytest.approx(0.0, abs=1e-15)
        assert erm.chosen_axes.tolist() == [0, 1]

    def test_bad_axis_outvotes_good(self):
        inst = build_hard_instance(1, 1, 0.1)
        erm = erm_hard(inst, np.array([1, 3]))
        assert erm.chosen_axes.tolist() == [1]
        assert erm.b_ex == 1
        assert erm.excess == pytest.approx(inst.p * 0.1)

    def test_ties_prefer_good_axes(self):
        inst = build_hard_instance(1, 1, 0.1)
        erm = erm_hard(inst, np.array([2, 2]))
        assert erm.chosen_axes.tolist() == [0]
        assert erm.b_ex == 0

    def test_accounting_identity_on_sampled_runs(self):
        rng = make_rng(76)
        for k, j, eps in [(1, 1, 0.3), (2, 1, 0.1), (2, 2, 0.05), (3, 1, 0.5)]:
            inst = build_hard_instance(k, j, eps)
            for n in (16, 128, 1024):
                for _ in range(25):
                    _, counts = sample_hard(inst, n, rng)
                    erm = erm_hard(inst, counts)
                    assert abs(erm.excess - inst.p * eps * erm.b_ex) < 1e-12

    def test_selection_matches_subset_brute_force(self):
        rng = make_rng(77)
        for k, j in [(1, 1), (2, 1), (1, 3), (3, 1)]:
            inst = build_hard_instance(k, j, 0.15)
            for _ in range(20):
                _, counts = sample_hard(inst, 64, rng)
                erm = erm_hard(inst, counts)
                n_unsel = counts.sum() - counts[erm.chosen_axes].sum()
                assert n_unsel == brute_force_erm_cost(inst, counts)

    def test_bad_counts_length(self):
        inst = build_hard_instance(1, 1, 0.1)
        with pytest.raises(DomainError):
            erm_hard(inst, np.array([1, 2, 3]))


class TestScalingExperiment:
    def test_large_n_mean_excess_vanishes(self):
        # Chernoff regime: miscounts are exponentially unlikely at n = 1e6
        inst = build_hard_instance(2, 1, 0.05)
        rng = make_rng(78)
        excesses = []
        for _ in range(60):
            _, counts = sample_hard(inst, 1_000_000, rng)
            excesses.append(erm_hard(inst, counts).excess)
        mean = float(np.mean(excesses))
        assert mean < 0.05 * inst.p * 2 * 0.05

    def test_rows_reproducible(self):
        rows_a = hard_scaling_experiment(2, 1, [0.1], [64, 128], 3, seed=9)
        rows_b = hard_scaling_experiment(2, 1, [0.1], [64, 128], 3, seed=9)
        assert [r.as_record() for r in rows_a] == [r.as_record() for r in rows_b]
        assert len(rows_a) == 2 * 3

    def test_mean_excess_monotone_in_n(self):
        n_grid = [2 ** e for e in range(6, 13)]
        eps = sensitivity_eps(2, 1, n_grid)
        rows = hard_scaling_experiment(2, 1, [eps], n_grid, 250, seed=10)
        by_n = {}
        for r in rows:
            by_n.setdefault(r.n, []).append(r.excess)
        prev_mean, prev_sem = None, None
        for n in n_grid:
            vals = np.array(by_n[n])
            mean = vals.mean()
            sem = vals.std(ddof=1) / math.sqrt(len(vals))
            if prev_mean is not None:
                allowance = 3.0 * math.hypot(sem, prev_sem)
                assert mean <= prev_mean + allowance
            prev_mean, prev_sem = mean, sem

    def test_empty_grid_rejected(self):
        with pytest.raises(DomainError):
            hard_scaling_experiment(1, 1, [], [64], 5, seed=0)
