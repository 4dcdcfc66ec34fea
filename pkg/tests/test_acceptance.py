"""Acceptance gate: every release criterion, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines; each
criterion is a single test that prints its verdict and asserts it.
Tolerances are pinned here, not calibrated elsewhere.
"""

import math
import time
import warnings
from fractions import Fraction

import numpy as np

from bhtlab.constrained import (
    DivergenceObjective,
    constrained_complexity_check,
    huber_lfd,
    optimal_quantizer_dp,
)
from bhtlab.distributions import Distribution
from bhtlab.divergences import (
    classic_divergences,
    h_lambda,
    js_alpha,
    lambda_for_prior,
)
from bhtlab.inequality_lab import (
    DEFAULT_ALPHAS,
    check_js_h_inequality,
    check_linear_vs_nearly_linear,
    derivative_check,
    weak_detection_examples,
    zero_bias_weak_detection_closed_form,
)
from bhtlab.oracle import (
    TestingInstance,
    bayes_error_exact,
    n_star_bayes_exact,
    np_curve_point,
)
from bhtlab.reductions import majority_tail_dominated, verify_error_amplification

from .conftest import random_pair_with_h2
from .oracles import brute_bayes_error, brute_np_beta


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_1_oracle_matches_exhaustive_enumeration():
    """Exact error and trade-off curves vs full sample-space enumeration."""
    start = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    cases = 0
    pairs = []
    for k in (2, 3):
        for _ in range(6):
            pairs.append(
                (
                    Distribution.from_probs(rng.dirichlet(np.ones(k))),
                    Distribution.from_probs(rng.dirichlet(np.ones(k))),
                )
            )
    pairs.append((Distribution.bernoulli(0.0), Distribution.bernoulli(0.3)))
    pairs.append(
        (
            Distribution.from_probs([0.5, 0.5, 0.0]),
            Distribution.from_probs([0.0, 0.4, 0.6]),
        )
    )
    for p, q in pairs:
        for n in range(1, 7):
            for alpha in (0.1, 0.3, 0.5):
                got = bayes_error_exact(p, q, alpha, n)
                want = brute_bayes_error(p, q, alpha, n)
                worst = max(worst, abs(got - want))
            for level in (0.0, 0.05, 0.25, 0.6, 1.0):
                got = np_curve_point(p, q, n, level)
                want = brute_np_beta(p, q, n, level)
                worst = max(worst, abs(got - want))
            cases += 1
    elapsed = time.time() - start
    ok = worst <= 1e-10 and elapsed < 10.0
    _verdict(
        1,
        ok,
        f"oracle vs exhaustive enumeration on {cases} (pair, n) cells: "
        f"maxError={worst:.2e} (tol 1e-10), {elapsed:.1f}s (< 10s)",
    )


def test_criterion_2_one_sided_closed_form_exact():
    """min(alpha, (1-alpha)(1-eps)^n) reproduced to 1e-12 up to n=500."""
    worst = 0.0
    p = Distribution.bernoulli(0.0)
    for eps in (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5):
        q = Distribution.bernoulli(eps)
        for alpha in (0.05, 0.25, 0.5):
            for n in range(0, 501, 7):
                got = bayes_error_exact(p, q, alpha, n)
                want = min(alpha, (1 - alpha) * (1 - eps) ** n)
                worst = max(worst, abs(got - want))
    ok = worst <= 1e-12
    _verdict(
        2,
        ok,
        f"one-sided family closed form: max deviation {worst:.2e} (tol 1e-12), "
        "eps in {0.01..0.5}, n <= 500",
    )


def test_criterion_3_linear_regime_sandwich():
    """Certified bounds bracket the exact complexity on 200 random instances."""
    start = time.time()
    rng = np.random.default_rng(307)
    caps = {2: 20000, 3: 1200, 4: 180}
    instances = 0
    violations = 0
    forced_alphas = [2.0**-10, 0.5]
    while instances < 200:
        k = int(rng.integers(2, 5))
        base = rng.dirichlet(np.ones(k))
        other = rng.dirichlet(np.ones(k))
        t = rng.uniform(0.05, 0.9)
        p = Distribution.from_probs((1 - t) * base + t * other)
        q = Distribution.from_probs(base)
        h2 = classic_divergences(p, q).hellinger_sq
        if not 0.01 < h2 <= 0.125:
            continue
        if forced_alphas and k == 2:
            alpha = forced_alphas.pop()
        else:
            alpha = float(2.0 ** rng.uniform(-10, -1))
        lam = lambda_for_prior(alpha)
        h_bar = h_lambda(p, q, lam.lam_bar)
        if h_bar <= 0.0:
            continue
        upper = math.ceil(2.0 / h_bar)
        if upper > caps[k]:
            continue
        js = js_alpha(p, q, alpha)
        lower = math.ceil((3.0 / 16.0) * alpha * math.log(1.0 / alpha) / js)
        exact = n_star_bayes_exact(
            TestingInstance.bayesian(p, q, alpha, alpha / 4.0), n_cap=100_000
        )
        if not (lower <= exact <= upper):
            violations += 1
        instances += 1
    elapsed = time.time() - start
    ok = violations == 0 and instances >= 200 and elapsed < 300.0
    _verdict(
        3,
        ok,
        f"linear sandwich ceil(3/16 a log(1/a)/JS) <= n* <= ceil(2/H): "
        f"{instances} instances, {violations} violations, {elapsed:.1f}s (< 300s)",
    )


def test_criterion_4_grid_inequality_and_ceiling_chain():
    """Zero violations of the JS-vs-H bound and its ceiling chain on the grid."""
    start = time.time()
    report = check_js_h_inequality()
    elapsed = time.time() - start
    ok = (
        report.points_checked >= 3_000_000
        and len(DEFAULT_ALPHAS) == 20
        and report.max_violation <= 1e-12
        and report.ceil_chain_max_violation <= 1e-12
        and elapsed < 600.0
    )
    _verdict(
        4,
        ok,
        f"two-point grid: {report.points_checked} point evaluations across "
        f"{len(DEFAULT_ALPHAS)} priors, max violation {report.max_violation:.2e}, "
        f"chain violation {report.ceil_chain_max_violation:.2e} (tol 1e-12), "
        f"max ratio {report.max_ratio:.3f}, {elapsed:.1f}s (< 600s)",
    )


def test_criterion_5_derivatives_and_scalar_bound():
    """Analytic derivatives vs finite differences; scalar exponent bound."""
    rng = np.random.default_rng(505)
    pb = rng.uniform(0.01, 0.99, 10_000)
    qb = rng.uniform(0.02, 0.98, 10_000)
    worst = 0.0
    for alpha in (0.5, 0.2, 0.03, 2.0**-12, 2.0**-20):
        rep = derivative_check(pb, qb, alpha, lambda_for_prior(alpha).lam)
        worst = max(worst, rep.max_rel_err_first, rep.max_rel_err_second)
    deriv_ok = worst <= 1e-6

    x_grid = np.logspace(-8, 10, 10_000)
    scalar_worst = -math.inf
    for alpha in DEFAULT_ALPHAS:
        lam_star = min(0.5, lambda_for_prior(alpha).lam)
        rep = check_linear_vs_nearly_linear(x_grid, alpha, lam_star)
        scalar_worst = max(scalar_worst, rep.max_violation)
    scalar_ok = scalar_worst <= 1e-12
    ok = deriv_ok and scalar_ok
    _verdict(
        5,
        ok,
        f"derivative formulas at 1e4 points: max rel err {worst:.2e} (tol 1e-6); "
        f"scalar bound on 1e4-point grid x 20 priors: max violation "
        f"{scalar_worst:.2e} (tol 1e-12)",
    )


def test_criterion_6_amplification_and_boost_tail():
    """Bucketed lower bound on 50 oracle instances; exact tail domination."""
    rng = np.random.default_rng(606)
    checked = 0
    failures = 0
    seen_T = set()
    # error ranges keeping (2a)^(1/T) <= 1/4 so every T stays feasible
    ranges = {1: (0.01, 0.1), 2: (0.005, 0.03), 3: (0.002, 0.0075)}
    while checked < 50:
        T = int(rng.integers(1, 4))
        lo, hi = ranges[T]
        p, q, _ = random_pair_with_h2(rng, 2, 0.03, 0.125)
        a = float(rng.uniform(lo, hi))
        b = float(rng.uniform(lo, hi))
        chk = verify_error_amplification(p, q, a, b, T, n_cap=20_000)
        if chk.holds is None:
            continue
        if not chk.holds:
            failures += 1
        seen_T.add(T)
        checked += 1
    amp_ok = failures == 0 and seen_T == {1, 2, 3}

    tail_violations = 0
    tail_checks = 0
    taus = [Fraction(k, 80) for k in range(1, 21)]  # (0, 1/4]
    for tau in taus:
        for T in range(1, 201):
            if not majority_tail_dominated(tau, T):
                tail_violations += 1
            tail_checks += 1
    tail_ok = tail_violations == 0
    ok = amp_ok and tail_ok
    _verdict(
        6,
        ok,
        f"error amplification holds on {checked} instances ({failures} failures); "
        f"majority tail <= tau^(T/32) in exact arithmetic on {tail_checks} "
        f"(tau, T) pairs ({tail_violations} violations)",
    )


def test_criterion_7_one_sided_asymmetry():
    """Swapping the hypotheses changes the exact complexity by >= 1.5x."""
    alpha, delta, eps = 0.1, 0.01, 0.1
    p = Distribution.bernoulli(0.0)
    q = Distribution.bernoulli(eps)
    fwd = n_star_bayes_exact(TestingInstance.bayesian(p, q, alpha, delta))
    rev = n_star_bayes_exact(TestingInstance.bayesian(q, p, alpha, delta))
    closed_fwd = math.ceil(math.log((1 - alpha) / delta) / math.log(1 / (1 - eps)))
    closed_rev = math.ceil(math.log(alpha / delta) / math.log(1 / (1 - eps)))
    ok = fwd == closed_fwd and rev == closed_rev and fwd / rev >= 1.5
    _verdict(
        7,
        ok,
        f"asymmetry: n*(p,q)={fwd} (closed form {closed_fwd}), "
        f"n*(q,p)={rev} (closed form {closed_rev}), ratio "
        f"{fwd / rev:.2f} >= 1.5",
    )


def test_criterion_8_weak_detection_scalings():
    """Gaussian slope 2, one-sided slope 1, and 20 exact closed-form points."""
    rep = weak_detection_examples()
    rng = np.random.default_rng(808)
    matches = 0
    total = 20
    for _ in range(total):
        alpha = float(rng.uniform(0.02, 0.45))
        gamma = float(rng.uniform(0.001, 0.5))
        eps = float(rng.uniform(0.01, 0.3))
        p = Distribution.bernoulli(0.0)
        q = Distribution.bernoulli(eps)
        inst = TestingInstance.bayesian(p, q, alpha, alpha * (1 - gamma))
        if n_star_bayes_exact(inst) == zero_bias_weak_detection_closed_form(
            alpha, gamma, eps
        ):
            matches += 1
    ok = (
        abs(rep.gaussian_slope - 2.0) <= 0.05
        and abs(rep.bernoulli_slope - 1.0) <= 0.05
        and matches == total
    )
    _verdict(
        8,
        ok,
        f"weak detection: gaussian slope {rep.gaussian_slope:.3f} (2 +/- 0.05), "
        f"one-sided slope {rep.bernoulli_slope:.3f} (1 +/- 0.05), closed form "
        f"matched the oracle on {matches}/{total} points",
    )


def test_criterion_9_quantizer_dp_and_communication_cost():
    """DP quantizer optimal vs brute force; quantization never helps; ratio law."""
    from .oracles import brute_quantizer

    rng = np.random.default_rng(909)
    worst_gap = 0.0
    for trial in range(100):
        k = int(rng.integers(2, 9))
        D = int(rng.integers(1, 4))
        p = Distribution.from_probs(rng.dirichlet(np.ones(k)))
        q = Distribution.from_probs(rng.dirichlet(np.ones(k)))
        if trial % 2:
            obj = DivergenceObjective("h_lambda", float(rng.uniform(0.1, 0.9)))
        else:
            obj = DivergenceObjective("js_alpha", float(rng.uniform(0.05, 0.5)))
        ch = optimal_quantizer_dp(p, q, D, obj)
        got = obj.value(ch.apply(p).as_array(), ch.apply(q).as_array())
        want = brute_quantizer(p, q, D, obj)
        worst_gap = max(worst_gap, abs(got - want))
    dp_ok = worst_gap <= 1e-12

    fitted = []
    monotone_ok = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        while len(fitted) < 20:
            k = int(rng.integers(3, 7))
            base = rng.dirichlet(np.ones(k))
            other = rng.dirichlet(np.ones(k))
            t = rng.uniform(0.2, 0.9)
            p = Distribution.from_probs((1 - t) * base + t * other)
            q = Distribution.from_probs(base)
            h2 = classic_divergences(p, q).hellinger_sq
            if not 0.04 < h2 <= 0.125:
                continue
            D = int(rng.integers(2, 4))
            alpha = float(rng.uniform(0.1, 0.5))
            rep = constrained_complexity_check(p, q, alpha, alpha / 4, D, n_cap=3000)
            monotone_ok &= rep.n_quantized >= rep.n_unconstrained
            fitted.append(rep.ratio / rep.ceiling_prior)
    arr = np.array(fitted)
    c_fit = float(arr.mean())
    half_a = float(arr[0::2].mean())
    half_b = float(arr[1::2].mean())
    stable = abs(half_a - half_b) <= 0.2 * max(half_a, half_b)
    ok = dp_ok and monotone_ok and stable
    _verdict(
        9,
        ok,
        f"quantizer DP == brute force on 100 pairs (max gap {worst_gap:.2e}, "
        f"tol 1e-12); quantized n* >= n* on {len(fitted)} instances; fitted "
        f"communication constant {c_fit:.3f} (max {arr.max():.3f}), halves "
        f"{half_a:.3f}/{half_b:.3f} within 20%",
    )


def test_criterion_10_robust_least_favorable_pair():
    """Budgets to 1e-10, pointwise clipping, and contamination never helps."""
    rng = np.random.default_rng(1010)
    budget_worst = 0.0
    clip_ok = True
    robust_ok = True
    checked = 0
    while checked < 20:
        k = int(rng.integers(2, 6))
        try:
            p, q, _ = random_pair_with_h2(rng, k, 0.03, 0.125)
        except AssertionError:
            continue
        tv = classic_divergences(p, q).tv
        eps = float(rng.uniform(0.1, 0.45)) * tv / 2
        pair = huber_lfd(p, q, eps)
        budget_worst = max(
            budget_worst, abs(pair.tv_p - eps), abs(pair.tv_q - eps)
        )
        pv, qv = p.as_array(), q.as_array()
        with np.errstate(divide="ignore"):
            ratio = np.where(qv > 0, pv / np.maximum(qv, 1e-300), np.inf)
        clipped = np.clip(ratio, pair.clip_lo, pair.clip_hi)
        got = pair.p_prime.as_array() / pair.q_prime.as_array()
        clip_ok &= bool(np.allclose(got, clipped, rtol=1e-9))
        base = n_star_bayes_exact(
            TestingInstance.bayesian(p, q, 0.2, 0.04), n_cap=20_000
        )
        rob = n_star_bayes_exact(
            TestingInstance.bayesian(pair.p_prime, pair.q_prime, 0.2, 0.04),
            n_cap=20_000,
        )
        if base is None or rob is None or rob < base:
            robust_ok = False
        checked += 1
    ok = budget_worst <= 1e-10 and clip_ok and robust_ok
    _verdict(
        10,
        ok,
        f"least favorable pair on {checked} instances: worst budget error "
        f"{budget_worst:.2e} (tol 1e-10), clipping pointwise {clip_ok}, "
        f"robust n* >= n* {robust_ok}",
    )
