"""Grid verification of the Jensen-Shannon vs Hellinger-family inequality
and its supporting derivative, convexity, and scalar claims.

Everything here is floating-point grid evidence, not interval-certified
proof; grids are deterministic so reports are reproducible.  Near
endpoint biases the closed forms are evaluated through their analytic
limits (masked 0 log 0 terms) rather than by dividing by zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .distributions import Distribution
from .divergences import h_lambda, js_alpha, lambda_for_prior
from .errors import DomainError
from .oracle import TestingInstance, n_star_bayes_exact

DEFAULT_ALPHAS = tuple(2.0**-i for i in range(1, 21))


# -- Bernoulli closed forms (vectorized) -------------------------------------


def bernoulli_js(pb, qb, alpha: float):
    """Skewed Jensen-Shannon divergence between Ber(pb) and Ber(qb)."""
    pb = np.asarray(pb, dtype=np.float64)
    qb = np.asarray(qb, dtype=np.float64)
    m = alpha * pb + (1.0 - alpha) * qb
    # complement mixture from complements: 1 - m cancels catastrophically
    # for biases within a few ulp of 1
    mbar = alpha * (1.0 - pb) + (1.0 - alpha) * (1.0 - qb)
    out = np.zeros(np.broadcast(pb, qb).shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        for mass, weight, mix in (
            (pb, alpha, m),
            (1.0 - pb, alpha, mbar),
            (qb, 1.0 - alpha, m),
            (1.0 - qb, 1.0 - alpha, mbar),
        ):
            term = weight * mass * np.log(mass / mix)
            out = out + np.where(mass > 0.0, term, 0.0)
    return np.maximum(out, 0.0)


def bernoulli_h(pb, qb, lam: float):
    """Hellinger-family divergence 1 - pb^lam qb^(1-lam) - (1-pb)^lam (1-qb)^(1-lam)."""
    pb = np.asarray(pb, dtype=np.float64)
    qb = np.asarray(qb, dtype=np.float64)
    aff = pb**lam * qb ** (1.0 - lam) + (1.0 - pb) ** lam * (1.0 - qb) ** (
        1.0 - lam
    )
    return np.maximum(1.0 - aff, 0.0)


def js_h_factor(alpha: float, lam: float) -> float:
    """The certified ratio bound: JS <= factor * H_(1-lam) with this factor."""
    r = lam * math.log(1.0 / alpha)
    return 32.0 * math.exp(2.0 * r) * alpha / lam


# -- analytic derivatives in the second bias ---------------------------------


def js_dq(pb, qb, alpha: float):
    pb, qb = np.asarray(pb, float), np.asarray(qb, float)
    abar = 1.0 - alpha
    m = alpha * pb + abar * qb
    mbar = alpha * (1.0 - pb) + abar * (1.0 - qb)
    return abar * np.log(qb / (1.0 - qb) * mbar / m)


def js_d2q(pb, qb, alpha: float):
    pb, qb = np.asarray(pb, float), np.asarray(qb, float)
    abar = 1.0 - alpha
    pbar, qbar = 1.0 - pb, 1.0 - qb
    num = alpha * pb * pbar + abar * pb * qbar + abar * qb * pbar - abar * qb * qbar
    den = qb * qbar * (alpha * pb + abar * qb) * (alpha * pbar + abar * qbar)
    return alpha * abar * num / den


def h_bar_dq(pb, qb, lam: float):
    pb, qb = np.asarray(pb, float), np.asarray(qb, float)
    lb = 1.0 - lam
    return -lam * pb**lb * qb ** (-lb) + lam * (1.0 - pb) ** lb * (1.0 - qb) ** (
        -lb
    )


def h_bar_d2q(pb, qb, lam: float):
    pb, qb = np.asarray(pb, float), np.asarray(qb, float)
    lb = 1.0 - lam
    return lam * lb * (
        pb**lb * qb ** (-lb - 1.0) + (1.0 - pb) ** lb * (1.0 - qb) ** (-lb - 1.0)
    )


# -- grids --------------------------------------------------------------------


def default_bias_grid(n_uniform: int = 400, n_corner: int = 30) -> np.ndarray:
    """Uniform [0,1] grid plus log-spaced points hugging both endpoints."""
    uniform = np.linspace(0.0, 1.0, n_uniform)
    corner = np.logspace(-12, -2, n_corner)
    grid = np.unique(np.concatenate([uniform, corner, 1.0 - corner]))
    return grid


# -- reports ------------------------------------------------------------------


@dataclass
class GridReport:
    points_checked: int
    max_violation: float
    max_ratio: float
    ceil_chain_max_violation: float
    worst_point: tuple = ()

    @property
    def ok(self) -> bool:
        return self.max_violation <= 1e-12 and self.ceil_chain_max_violation <= 1e-12


def check_js_h_inequality(
    alphas=DEFAULT_ALPHAS, bias_grid: np.ndarray | None = None
) -> GridReport:
    """Verify JS_a <= (32 e^(2 lam log(1/a)) a / lam) H_(1-lam) on a bias grid.

    Also checks the derived ceiling chain
    ``2/H_(1-lam) <= (256/log 2) a log(1/a) / JS_a`` pointwise (in its
    unceiled, stronger form).
    """
    if bias_grid is None:
        bias_grid = default_bias_grid()
    pb = bias_grid[:, None]
    qb = bias_grid[None, :]
    points = 0
    max_violation = 0.0
    max_ratio = 0.0
    chain_violation = 0.0
    worst: tuple = ()
    for alpha in alphas:
        lam = lambda_for_prior(alpha).lam
        factor = js_h_factor(alpha, lam)
        js = bernoulli_js(pb, qb, alpha)
        h = bernoulli_h(pb, qb, 1.0 - lam)
        points += js.size
        violation = js - factor * h
        vmax = float(violation.max())
        if vmax > max_violation:
            max_violation = vmax
            idx = np.unravel_index(int(np.argmax(violation)), violation.shape)
            worst = (alpha, float(bias_grid[idx[0]]), float(bias_grid[idx[1]]))
        pos = h > 0.0
        if np.any(pos):
            max_ratio = max(max_ratio, float((js[pos] / (factor * h[pos])).max()))
        # unceiled chain: 2/H <= (256/log2) a log(1/a) / JS wherever JS > 0
        live = (js > 0.0) & pos
        if np.any(live):
            lhs = 2.0 / h[live]
            rhs = (256.0 / math.log(2.0)) * alpha * math.log(1.0 / alpha) / js[live]
            chain_violation = max(chain_violation, float((lhs - rhs).max()))
    return GridReport(
        points_checked=points,
        max_violation=max_violation,
        max_ratio=max_ratio,
        ceil_chain_max_violation=chain_violation,
        worst_point=worst,
    )


@dataclass
class DerivativeReport:
    points_checked: int
    max_rel_err_first: float
    max_rel_err_second: float

    @property
    def ok(self) -> bool:
        return max(self.max_rel_err_first, self.max_rel_err_second) <= 1e-6


def derivative_check(
    pb: np.ndarray, qb: np.ndarray, alpha: float, lam: float, step: float = 1e-5
) -> DerivativeReport:
    """Analytic first/second derivatives vs central finite differences.

    The first derivative is differenced from the divergence values; the
    second is differenced from the analytic first derivative (a second
    difference of the values at this step size would sit below the
    cancellation floor).  Relative error uses a scale floor of 1 so
    near-stationary points are judged on absolute error.
    """
    pb = np.asarray(pb, float)
    qb = np.asarray(qb, float)
    if np.any((qb - step <= 0.0) | (qb + step >= 1.0)):
        raise DomainError("finite differences need interior qb")

    def rel(a, b):
        return np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))

    worst_1 = 0.0
    worst_2 = 0.0
    for fn, dfn, d1, d2 in (
        (
            lambda q: bernoulli_js(pb, q, alpha),
            lambda q: js_dq(pb, q, alpha),
            js_dq(pb, qb, alpha),
            js_d2q(pb, qb, alpha),
        ),
        (
            lambda q: bernoulli_h(pb, q, 1.0 - lam),
            lambda q: h_bar_dq(pb, q, lam),
            h_bar_dq(pb, qb, lam),
            h_bar_d2q(pb, qb, lam),
        ),
    ):
        fd1 = (fn(qb + step) - fn(qb - step)) / (2.0 * step)
        fd2 = (dfn(qb + step) - dfn(qb - step)) / (2.0 * step)
        worst_1 = max(worst_1, float(rel(fd1, d1).max()))
        worst_2 = max(worst_2, float(rel(fd2, d2).max()))
    return DerivativeReport(
        points_checked=int(np.broadcast(pb, qb).size),
        max_rel_err_first=worst_1,
        max_rel_err_second=worst_2,
    )


@dataclass
class HessianReport:
    worst_slack_by_region: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v >= -1e-10 for v in self.worst_slack_by_region.values())


def check_hessian_inequality(
    p_grid: np.ndarray,
    q_grid: np.ndarray,
    alphas=DEFAULT_ALPHAS,
) -> HessianReport:
    """Pointwise second-derivative domination over the three case regions.

    Verifies ``d2 JS <= (32 e^(2r) a / r) d2(log(1/a) H_(1-lam))`` for
    first biases <= 1/2 and interior second biases, reporting the worst
    slack (RHS - LHS) per region.
    """
    p_grid = np.asarray(p_grid, float)
    q_grid = np.asarray(q_grid, float)
    if np.any(p_grid > 0.5):
        raise DomainError("the first bias is assumed <= 1/2 (swap symmetry)")
    if np.any((q_grid <= 0.0) | (q_grid >= 1.0)):
        raise DomainError("second biases must be interior")
    pb = p_grid[:, None]
    qb = q_grid[None, :]
    slack = {"q<=p<=1/2": np.inf, "q>=1/2": np.inf, "p<=q<=1/2": np.inf}
    for alpha in alphas:
        lam = lambda_for_prior(alpha).lam
        r = lam * math.log(1.0 / alpha)
        lhs = js_d2q(pb, qb, alpha)
        rhs = (
            (32.0 * math.exp(2.0 * r) * alpha / r)
            * math.log(1.0 / alpha)
            * h_bar_d2q(pb, qb, lam)
        )
        diff = rhs - lhs
        regions = {
            "q<=p<=1/2": qb <= pb,
            "q>=1/2": np.broadcast_to(qb >= 0.5, diff.shape),
            "p<=q<=1/2": (pb <= qb) & (qb <= 0.5),
        }
        for name, mask in regions.items():
            if np.any(mask):
                slack[name] = min(slack[name], float(diff[mask].min()))
    return HessianReport(worst_slack_by_region=slack)


@dataclass
class ScalarBoundReport:
    points_checked: int
    max_violation: float

    @property
    def ok(self) -> bool:
        return self.max_violation <= 1e-12


def check_linear_vs_nearly_linear(
    x_grid: np.ndarray, alpha: float, lam_star: float, r: float | None = None
) -> ScalarBoundReport:
    """Verify ``1 + x/(1 + a x) <= e^(2r) (1 + x)^(1 - lam_star)`` on a grid.

    ``r`` defaults to ``lam_star log(1/a)`` (the tightest admissible value);
    the grid is augmented with the proof's case-split point x = 1/a.
    """
    if not 0.0 < lam_star <= 0.5:
        raise DomainError(f"lam_star={lam_star} outside (0, 1/2]")
    if not 0.0 < alpha <= 0.5:
        raise DomainError(f"alpha={alpha} outside (0, 1/2]")
    if r is None:
        r = lam_star * math.log(1.0 / alpha)
    if lam_star > r / math.log(1.0 / alpha) + 1e-12 and alpha < 0.5:
        raise DomainError("need lam_star <= r / log(1/alpha)")
    x = np.unique(np.concatenate([np.asarray(x_grid, float), [1.0 / alpha]]))
    if np.any(x < 0.0):
        raise DomainError("x must be nonnegative")
    lhs = 1.0 + x / (1.0 + alpha * x)
    rhs = math.exp(2.0 * r) * (1.0 + x) ** (1.0 - lam_star)
    return ScalarBoundReport(
        points_checked=int(x.size), max_violation=float((lhs - rhs).max())
    )


@dataclass
class TransferReport:
    instances: int
    max_ratio: float
    max_violation: float

    @property
    def ok(self) -> bool:
        return self.max_violation <= 1e-12


def joint_range_transfer_check(
    pairs: list[tuple[Distribution, Distribution]], alphas=(0.5, 0.25, 0.05, 2.0**-10)
) -> TransferReport:
    """The two-point inequality holds verbatim on general finite supports.

    Being an f-divergence comparison, validity on two-point supports
    transfers by joint-range convexity; this spot-checks the transfer.
    """
    max_ratio = 0.0
    max_violation = -math.inf
    for p, q in pairs:
        for alpha in alphas:
            lam = lambda_for_prior(alpha).lam
            factor = js_h_factor(alpha, lam)
            js = js_alpha(p, q, alpha)
            h = h_lambda(p, q, 1.0 - lam)
            max_violation = max(max_violation, js - factor * h)
            if h > 0.0:
                max_ratio = max(max_ratio, js / (factor * h))
    return TransferReport(
        instances=len(pairs), max_ratio=max_ratio, max_violation=max_violation
    )


# -- worked weak-detection families -------------------------------------------


@dataclass
class WeakDetectionReport:
    gaussian_slope: float
    bernoulli_slope: float
    closed_form_matches: int
    closed_form_total: int

    @property
    def ok(self) -> bool:
        return (
            abs(self.gaussian_slope - 2.0) <= 0.05
            and abs(self.bernoulli_slope - 1.0) <= 0.05
            and self.closed_form_matches == self.closed_form_total
        )


def _loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def gaussian_weak_detection_n(gamma: float, separation: float) -> int:
    """Smallest n with TV of the n-sample Gaussian pair >= gamma (uniform prior)."""
    from .formulas import gaussian_tv

    z = ndtri((1.0 + gamma) / 2.0)
    n = max(1, math.ceil((2.0 * z / separation) ** 2))
    while n > 1 and gaussian_tv(separation / 2.0, -separation / 2.0, n - 1) >= gamma:
        n -= 1
    while gaussian_tv(separation / 2.0, -separation / 2.0, n) < gamma:
        n += 1
    return n


def bernoulli_one_sided_n(gamma: float, eps: float) -> int:
    """Smallest n with 1 - (1-eps)^n >= gamma (Ber(1) vs Ber(1-eps) family)."""
    n = max(1, math.ceil(math.log(1.0 - gamma) / math.log(1.0 - eps)))
    while n > 1 and 1.0 - (1.0 - eps) ** (n - 1) >= gamma:
        n -= 1
    while 1.0 - (1.0 - eps) ** n < gamma:
        n += 1
    return n


def zero_bias_weak_detection_closed_form(alpha: float, gamma: float, eps: float) -> int:
    """Closed-form n* for Ber(0) vs Ber(eps) at target error alpha(1-gamma)."""
    val = math.log((1.0 - alpha) / (alpha * (1.0 - gamma))) / math.log(
        1.0 / (1.0 - eps)
    )
    return max(0, math.ceil(val))


def weak_detection_examples(
    gammas: np.ndarray | None = None,
    separation: float = 1e-5,
    eps_one_sided: float = 1e-6,
    zero_bias_params: list[tuple[float, float, float]] | None = None,
) -> WeakDetectionReport:
    """Scaling-law checks in the weak-detection regime.

    (a) Gaussian pair: n*(gamma) scales as gamma^2 (log-log slope 2).
    (b) Ber(1) vs Ber(1-eps): exact TV is 1-(1-eps)^n, slope 1.
    (c) Ber(0) vs Ber(eps): the oracle matches the closed form exactly.
    """
    if gammas is None:
        gammas = 2.0 ** np.linspace(-10, -4, 13)
    g_n = np.array([gaussian_weak_detection_n(g, separation) for g in gammas])
    b_n = np.array([bernoulli_one_sided_n(g, eps_one_sided) for g in gammas])
    if zero_bias_params is None:
        zero_bias_params = [
            (0.1, 0.01, 0.05),
            (0.25, 0.05, 0.1),
            (0.05, 0.002, 0.02),
        ]
    matches = 0
    for alpha, gamma, eps in zero_bias_params:
        p = Distribution.bernoulli(0.0)
        q = Distribution.bernoulli(eps)
        inst = TestingInstance.bayesian(p, q, alpha, alpha * (1.0 - gamma))
        oracle_n = n_star_bayes_exact(inst)
        if oracle_n == zero_bias_weak_detection_closed_form(alpha, gamma, eps):
            matches += 1
    return WeakDetectionReport(
        gaussian_slope=_loglog_slope(gammas, g_n),
        bernoulli_slope=_loglog_slope(gammas, b_n),
        closed_form_matches=matches,
        closed_form_total=len(zero_bias_params),
    )
