import math

import numpy as np
import pytest

from riskbench import (PointSet, empirical_complexity, make_rng,
                       paired_complexities, rank_j_pool_check)
from riskbench.complexity import SQRT_2PI, random_rank_j_pool, trial_suprema
from riskbench.errors import DomainError, EmptyPool

from helpers import random_in_ball


def exact_mean_abs_sign_sum(n):
    """E|sum of n independent signs| by exact binomial enumeration."""
    total = 0.0
    for heads in range(n + 1):
        total += math.comb(n, heads) * abs(n - 2 * heads)
    return total / 2.0 ** n


class TestEmpiricalComplexity:
    def test_zero_pool_is_exactly_zero(self):
        est = empirical_complexity([np.zeros(8)], "rademacher", 500, make_rng(1))
        assert est.value == 0.0
        assert est.stderr == 0.0

    def test_sign_pair_n1_is_exactly_one(self):
        v = np.ones(1)
        est = empirical_complexity([v, -v], "rademacher", 300, make_rng(2))
        assert est.value == 1.0

    def test_sign_pair_n16_matches_enumeration(self):
        n, trials = 16, 4000
        v = np.ones(n)
        est = empirical_complexity([v, -v], "rademacher", trials, make_rng(3))
        exact = exact_mean_abs_sign_sum(n) / n
        assert abs(est.value - exact) <= 3.0 * est.stderr

    def test_pool_growth_never_lowers_trial_suprema(self, rng):
        n = 32
        small = [rng.standard_normal(n) for _ in range(5)]
        extra = [rng.standard_normal(n) for _ in range(5)]
        sup_small = trial_suprema(small, "rademacher", 400, make_rng(4))
        sup_big = trial_suprema(small + extra, "rademacher", 400, make_rng(4))
        assert np.all(sup_big >= sup_small - 1e-15)

    def test_trials_minimum_enforced(self):
        with pytest.raises(DomainError):
            empirical_complexity([np.ones(4)], "rademacher", 50, make_rng(0))

    def test_empty_pool(self):
        with pytest.raises(EmptyPool):
            empirical_complexity([], "gaussian", 200, make_rng(0))

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            empirical_complexity([np.ones(4)], "bernoulli", 200, make_rng(0))


class TestPairedComparison:
    def test_rademacher_below_scaled_gaussian(self, rng):
        P = PointSet(random_in_ball(rng, 64, 6))
        pool = random_rank_j_pool(P, 2, 100, rng)
        rad, gauss = paired_complexities(pool, 2000, make_rng(5))
        allowance = 5.0 * (rad.stderr + SQRT_2PI * gauss.stderr)
        assert rad.value <= SQRT_2PI * gauss.value + allowance


class TestRankJPoolCheck:
    def test_full_rank_pool_estimates_zero(self, rng):
        P = PointSet(random_in_ball(rng, 40, 4))
        report = rank_j_pool_check(P, 4, 30, 300, make_rng(6))
        assert abs(report.estimate.value) < 1e-12
        assert report.passed

    def test_grid_case_n64_j2(self, rng):
        P = PointSet(random_in_ball(rng, 64, 8))
        report = rank_j_pool_check(P, 2, 200, 2000, make_rng(7))
        assert report.bound == pytest.approx(math.sqrt(2.0 / 64.0))
        assert report.passed

    def test_single_vector_pool_concentrates_at_zero(self, rng):
        n, trials = 64, 3000
        P = PointSet(random_in_ball(rng, n, 6))
        pool = random_rank_j_pool(P, 2, 1, rng)
        est = empirical_complexity(pool, "rademacher", trials, make_rng(8))
        # sub-Gaussian tail oracle: sd of the mean is ||v||_2 / (n sqrt(T))
        bound = 3.0 * float(np.linalg.norm(pool[0])) / (n * math.sqrt(trials))
        assert abs(est.value) <= bound

    def test_three_by_three_grid(self):
        for n in (32, 64, 128):
            for j in (1, 2, 3):
                rng = make_rng(9, n, j)
                P = PointSet(random_in_ball(rng, n, 8))
                report = rank_j_pool_check(P, j, 100, 800, rng)
                assert report.passed, (n, j, report.estimate.value, report.bound)
