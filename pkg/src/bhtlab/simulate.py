"""Monte Carlo harness for likelihood-ratio tests and boosted majorities.

RNG: Philox (a named counter-based 64-bit generator) keyed by the seed.
Trials are processed in fixed-size chunks; chunk ``c`` draws from the
generator advanced to offset ``c * 2**40``, so results are bit-identical
for a given config regardless of how chunks are scheduled or partitioned
across workers (merge is by summation).

Ties at the llr threshold resolve to the second hypothesis (the
(1-alpha)-weighted one), matching the strict-inequality convention used
by the exact error expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, aligned_arrays
from .errors import DomainError
from .oracle import build_llr_table

CHUNK = 1 << 14
_CHUNK_STRIDE = 1 << 40


@dataclass(frozen=True)
class SimConfig:
    """Deterministic simulation plan: identical configs give identical results."""

    trials: int
    seed: int
    threshold: float | None = None  # None -> log((1-alpha)/alpha)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise DomainError("trials must be >= 1")


@dataclass(frozen=True)
class SimResult:
    err_hat: float
    ci95: tuple[float, float]
    trials: int
    errors: int


def wilson_interval(errors: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise DomainError("trials must be positive")
    phat = errors / trials
    denom = 1.0 + z**2 / trials
    center = (phat + z**2 / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1.0 - phat) / trials + z**2 / (4 * trials**2))
        / denom
    )
    return (max(0.0, center - half), min(1.0, center + half))


def _llr_pieces(pv: np.ndarray, qv: np.ndarray):
    finite = (pv > 0.0) & (qv > 0.0)
    plus = (pv > 0.0) & (qv == 0.0)
    minus = (pv == 0.0) & (qv > 0.0)
    llr_f = np.zeros(pv.shape[0])
    llr_f[finite] = np.log(pv[finite]) - np.log(qv[finite])
    return finite, plus, minus, llr_f


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    bits = np.random.Philox(key=seed)
    bits.advance(chunk_index * _CHUNK_STRIDE)
    return np.random.Generator(bits)


def _llr_of_counts(counts, finite, plus, minus, llr_f):
    """LLR of count vectors; +/-inf when an impossible symbol appears."""
    vals = counts[:, finite].astype(np.float64) @ llr_f[finite]
    has_plus = counts[:, plus].sum(axis=1) > 0
    has_minus = counts[:, minus].sum(axis=1) > 0
    vals = np.where(has_plus, np.inf, vals)
    vals = np.where(has_minus, -np.inf, vals)
    return vals


def simulate_lrt(
    p: Distribution, q: Distribution, alpha: float, n: int, cfg: SimConfig
) -> SimResult:
    """Empirical prior-weighted error of the threshold llr test.

    Streams trials in chunks (O(chunk) memory); returns the error rate
    with a 95% binomial confidence interval.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha} outside (0, 1)")
    if n < 1:
        raise DomainError("n must be >= 1")
    pv, qv = aligned_arrays(p, q)
    finite, plus, minus, llr_f = _llr_pieces(pv, qv)
    threshold = (
        cfg.threshold
        if cfg.threshold is not None
        else math.log((1.0 - alpha) / alpha)
    )
    errors = 0
    done = 0
    chunk_index = 0
    while done < cfg.trials:
        m = min(CHUNK, cfg.trials - done)
        rng = _chunk_rng(cfg.seed, chunk_index)
        theta_is_p = rng.random(m) < alpha
        n_p = int(theta_is_p.sum())
        decide_p = np.empty(m, dtype=bool)
        if n_p:
            counts = rng.multinomial(n, pv, size=n_p)
            decide_p[theta_is_p] = (
                _llr_of_counts(counts, finite, plus, minus, llr_f) > threshold
            )
        if m - n_p:
            counts = rng.multinomial(n, qv, size=m - n_p)
            decide_p[~theta_is_p] = (
                _llr_of_counts(counts, finite, plus, minus, llr_f) > threshold
            )
        errors += int((theta_is_p != decide_p).sum())
        done += m
        chunk_index += 1
    err_hat = errors / cfg.trials
    return SimResult(err_hat, wilson_interval(errors, cfg.trials), cfg.trials, errors)


def exact_threshold_errors(
    p: Distribution, q: Distribution, n: int, threshold: float
) -> tuple[float, float]:
    """Exact (type-I, type-II) errors of the strict-threshold llr test."""
    table = build_llr_table(p, q, n)
    reject_p = table.llr <= threshold
    err_p = float(table.p_mass[reject_p].sum())
    err_q = float(table.q_mass[~reject_p].sum())
    return err_p, err_q


def exact_boosted_bayes_error(
    err_p: float, err_q: float, alpha: float, T: int
) -> float:
    """Exact prior-weighted error of the T-vote majority of a base test.

    A tie (possible for even T) resolves to the second hypothesis, so it
    counts as an error only under the first.
    """
    if T < 1:
        raise DomainError("T must be >= 1")

    def tail(prob: float, k_min: int) -> float:
        return math.fsum(
            math.comb(T, w) * prob**w * (1.0 - prob) ** (T - w)
            for w in range(k_min, T + 1)
        )

    wrong_p_min = T - T // 2  # votes for q needed so votes_p <= T/2
    wrong_q_min = T // 2 + 1  # votes for p needed so votes_p > T/2
    return alpha * tail(err_p, wrong_p_min) + (1.0 - alpha) * tail(
        err_q, wrong_q_min
    )


def simulate_boosted(
    p: Distribution,
    q: Distribution,
    alpha: float,
    n: int,
    T: int,
    cfg: SimConfig,
) -> SimResult:
    """Empirical error of the majority over T independent n-sample tests.

    Requires the base test's exact per-hypothesis errors to be at most
    1/4 (checked via the exact table); raises otherwise, reporting the
    measured value.
    """
    if T < 1:
        raise DomainError("T must be >= 1")
    pv, qv = aligned_arrays(p, q)
    finite, plus, minus, llr_f = _llr_pieces(pv, qv)
    threshold = (
        cfg.threshold
        if cfg.threshold is not None
        else math.log((1.0 - alpha) / alpha)
    )
    err_p, err_q = exact_threshold_errors(p, q, n, threshold)
    tau = max(err_p, err_q)
    if tau > 0.25:
        raise DomainError(
            f"base test error tau={tau:.6g} exceeds 1/4; boosting hypothesis fails"
        )
    chunk = max(1, CHUNK // max(T, 1))
    errors = 0
    done = 0
    chunk_index = 0
    while done < cfg.trials:
        m = min(chunk, cfg.trials - done)
        rng = _chunk_rng(cfg.seed, chunk_index)
        theta_is_p = rng.random(m) < alpha
        n_p = int(theta_is_p.sum())
        decide_p = np.empty(m, dtype=bool)
        for mask, dist in ((theta_is_p, pv), (~theta_is_p, qv)):
            cnt = int(mask.sum())
            if not cnt:
                continue
            counts = rng.multinomial(n, dist, size=(cnt, T))
            flat = counts.reshape(cnt * T, -1)
            votes = (
                _llr_of_counts(flat, finite, plus, minus, llr_f) > threshold
            ).reshape(cnt, T)
            decide_p[mask] = votes.sum(axis=1) > T / 2.0
        errors += int((theta_is_p != decide_p).sum())
        done += m
        chunk_index += 1
    err_hat = errors / cfg.trials
    return SimResult(err_hat, wilson_interval(errors, cfg.trials), cfg.trials, errors)
