import math

import pytest

from bhtlab.distributions import Distribution
from bhtlab.errors import DomainError
from bhtlab.oracle import bayes_error_exact
from bhtlab.reductions import boost_error_bound
from bhtlab.simulate import (
    SimConfig,
    exact_boosted_bayes_error,
    exact_threshold_errors,
    simulate_boosted,
    simulate_lrt,
    wilson_interval,
)

PAIR = (Distribution.bernoulli(0.3), Distribution.bernoulli(0.7))


class TestLrt:
    def test_seed_determinism(self):
        p, q = PAIR
        cfg = SimConfig(trials=5000, seed=99)
        a = simulate_lrt(p, q, 0.4, 3, cfg)
        b = simulate_lrt(p, q, 0.4, 3, cfg)
        assert a.err_hat == b.err_hat and a.errors == b.errors

    def test_identical_pair_errs_at_prior(self):
        d = Distribution.bernoulli(0.5)
        res = simulate_lrt(d, d, 0.3, 4, SimConfig(trials=40000, seed=5))
        # ties at llr 0 < log(7/3) resolve to the second hypothesis
        assert res.ci95[0] <= 0.3 <= res.ci95[1]

    def test_ci_contains_exact_single_sample(self):
        p, q = PAIR
        res = simulate_lrt(p, q, 0.5, 1, SimConfig(trials=30000, seed=11))
        assert res.ci95[0] <= bayes_error_exact(p, q, 0.5, 1) <= res.ci95[1]

    def test_ci_coverage_calibration(self):
        p, q = PAIR
        exact = bayes_error_exact(p, q, 0.35, 4)
        hits = 0
        for seed in range(100):
            res = simulate_lrt(p, q, 0.35, 4, SimConfig(trials=1500, seed=seed))
            hits += res.ci95[0] <= exact <= res.ci95[1]
        assert hits >= 93

    def test_one_sided_family_infinite_llr(self):
        p = Distribution.bernoulli(0.0)
        q = Distribution.bernoulli(0.2)
        res = simulate_lrt(p, q, 0.25, 10, SimConfig(trials=20000, seed=2))
        exact = bayes_error_exact(p, q, 0.25, 10)
        assert res.ci95[0] <= exact <= res.ci95[1]


class TestBoosted:
    def test_t_one_matches_lrt(self):
        # odd n keeps the tie atom away from the threshold, so the base
        # test's errors stay under 1/4
        p, q = PAIR
        cfg = SimConfig(trials=3000, seed=17)
        a = simulate_boosted(p, q, 0.5, 3, 1, cfg)
        b = simulate_lrt(p, q, 0.5, 3, cfg)
        assert a.err_hat == pytest.approx(b.err_hat, abs=0.03)

    def test_hypothesis_violation_reports_tau(self):
        p = Distribution.bernoulli(0.45)
        q = Distribution.bernoulli(0.55)
        with pytest.raises(DomainError, match="tau"):
            simulate_boosted(p, q, 0.5, 1, 8, SimConfig(trials=100, seed=0))

    def test_error_below_boost_bound(self):
        p, q = PAIR
        n, T, alpha = 3, 16, 0.5
        err_p, err_q = exact_threshold_errors(p, q, n, math.log(1.0))
        tau = max(err_p, err_q)
        res = simulate_boosted(p, q, alpha, n, T, SimConfig(trials=6000, seed=3))
        bound = boost_error_bound(tau, T).bound
        assert res.err_hat <= bound + (res.ci95[1] - res.ci95[0])

    def test_exact_binomial_path_inside_ci(self):
        p, q = PAIR
        n, T, alpha = 3, 5, 0.4
        thr = math.log((1 - alpha) / alpha)
        err_p, err_q = exact_threshold_errors(p, q, n, thr)
        exact = exact_boosted_bayes_error(err_p, err_q, alpha, T)
        res = simulate_boosted(p, q, alpha, n, T, SimConfig(trials=20000, seed=29))
        assert res.ci95[0] <= exact <= res.ci95[1]


class TestHelpers:
    def test_wilson_degenerate(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == pytest.approx(0.0, abs=1e-15)
        assert hi < 0.05

    def test_exact_threshold_errors_sum(self):
        p, q = PAIR
        err_p, err_q = exact_threshold_errors(p, q, 1, 0.0)
        # strict threshold at 0: under p accept only positive llr
        assert err_p == pytest.approx(0.3, abs=1e-15)
        assert err_q == pytest.approx(0.3, abs=1e-15)

    def test_boosted_exact_monotone_in_T(self):
        vals = [exact_boosted_bayes_error(0.1, 0.12, 0.4, T) for T in (1, 3, 5, 9)]
        for a, b in zip(vals, vals[1:]):
            assert b <= a + 1e-12
