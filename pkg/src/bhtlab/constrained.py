"""Quantizer optimization, local-privacy channel search, and robust
least-favorable pairs.

The quantizer search restricts to deterministic maps whose cells are
contiguous intervals of the llr-sorted support — the optimal deterministic
quantizer for a binary test partitions the likelihood-ratio axis — and is
validated against brute force over all maps at desk scale rather than
taken on faith.  The privacy search is explicitly approximate: a coarse
feasible grid plus generalized randomized-response candidates, polished by
feasibility-preserving coordinate descent.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Hashable, Literal

import numpy as np
from scipy.optimize import brentq

from .distributions import Distribution, aligned_arrays
from .errors import CapacityError, DomainError, DistributionError
from .divergences import classic_divergences
from .oracle import DEFAULT_N_CAP, TestingInstance, n_star_bayes_exact

ROW_TOL = 1e-12
LDP_SLACK = 1e-12


@dataclass(frozen=True)
class Channel:
    """Row-stochastic map from an input support to an output support."""

    matrix: np.ndarray
    input_labels: tuple[Hashable, ...]
    output_labels: tuple[Hashable, ...]
    epsilon_ldp: float | None = None

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2:
            raise DistributionError("channel matrix must be 2-D")
        if m.shape != (len(self.input_labels), len(self.output_labels)):
            raise DistributionError("channel shape does not match labels")
        if np.any(m < -ROW_TOL):
            raise DistributionError("channel entries must be nonnegative")
        if np.any(np.abs(m.sum(axis=1) - 1.0) > ROW_TOL):
            raise DistributionError("channel rows must sum to 1")
        m = np.clip(m, 0.0, None)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        if self.epsilon_ldp is not None and not ldp_feasible(self, self.epsilon_ldp):
            raise DomainError(
                f"channel is not {self.epsilon_ldp}-locally-private"
            )

    def apply(self, dist: Distribution) -> Distribution:
        """Push a distribution forward through the channel."""
        if dist.labels != self.input_labels:
            raise DistributionError("distribution labels do not match channel input")
        out = dist.as_array() @ self.matrix
        return Distribution(tuple(out), self.output_labels)

    def to_json(self) -> str:
        return json.dumps(
            {
                "input_labels": list(self.input_labels),
                "output_labels": list(self.output_labels),
                "rows": [list(row) for row in self.matrix],
                "epsilon_ldp": self.epsilon_ldp,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Channel":
        obj = json.loads(text)
        return cls(
            np.asarray(obj["rows"], dtype=np.float64),
            tuple(obj["input_labels"]),
            tuple(obj["output_labels"]),
            obj.get("epsilon_ldp"),
        )


def ldp_feasible(ch: Channel, epsilon: float) -> bool:
    """Exact pairwise likelihood-ratio check, with 1e-12 slack.

    A channel is epsilon-locally-private when every output's probability
    differs across inputs by at most a factor e^epsilon.
    """
    if math.isinf(epsilon):
        return True
    bound = math.exp(epsilon)
    m = ch.matrix
    col_max = m.max(axis=0)
    col_min = m.min(axis=0)
    return bool(np.all(col_max <= bound * col_min + LDP_SLACK))


# -- divergence objectives -----------------------------------------------------


@dataclass(frozen=True)
class DivergenceObjective:
    """Per-cell-additive divergence used as a channel-design objective."""

    kind: Literal["h_lambda", "js_alpha"]
    param: float

    def __post_init__(self) -> None:
        if self.kind == "h_lambda" and not 0.0 < self.param < 1.0:
            raise DomainError(f"lambda={self.param} outside (0, 1)")
        if self.kind == "js_alpha" and not 0.0 < self.param < 1.0:
            raise DomainError(f"alpha={self.param} outside (0, 1)")

    def cell_term(self, pc: float, qc: float) -> float:
        """Additive contribution of one output cell with masses (pc, qc)."""
        if self.kind == "h_lambda":
            if pc <= 0.0 or qc <= 0.0:
                return 0.0
            return -(pc**self.param * qc ** (1.0 - self.param))
        alpha = self.param
        m = alpha * pc + (1.0 - alpha) * qc
        out = 0.0
        if pc > 0.0:
            out += alpha * pc * math.log(pc / m)
        if qc > 0.0:
            out += (1.0 - alpha) * qc * math.log(qc / m)
        return out

    def offset(self) -> float:
        """Constant completing sum-of-cell-terms into the divergence value."""
        return 1.0 if self.kind == "h_lambda" else 0.0

    def value(self, p_cells: np.ndarray, q_cells: np.ndarray) -> float:
        return self.offset() + math.fsum(
            self.cell_term(float(a), float(b)) for a, b in zip(p_cells, q_cells)
        )


def _llr_order(pv: np.ndarray, qv: np.ndarray) -> np.ndarray:
    """Indices sorted by single-sample llr, descending; ties keep input order."""
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.where(
            (pv > 0) & (qv > 0),
            np.log(np.maximum(pv, 1e-300)) - np.log(np.maximum(qv, 1e-300)),
            np.where(pv > 0, np.inf, np.where(qv > 0, -np.inf, 0.0)),
        )
    return np.argsort(-llr, kind="stable")


def optimal_quantizer_dp(
    p: Distribution, q: Distribution, D: int, objective: DivergenceObjective
) -> Channel:
    """Best deterministic quantizer to D outputs among llr-interval cells.

    Dynamic program over the llr-sorted support, O(k^2 D) cell-term
    evaluations.  With D >= k an injective map is returned (padding
    outputs stay unused); ties prefer the lexicographically smallest cell
    boundaries.
    """
    if D < 1:
        raise DomainError("D must be >= 1")
    pv, qv = aligned_arrays(p, q)
    k = pv.shape[0]
    order = _llr_order(pv, qv)
    matrix = np.zeros((k, D))
    if D >= k:
        for out_idx, sym in enumerate(order):
            matrix[sym, out_idx] = 1.0
        return Channel(matrix, p.labels, tuple(range(D)))

    ps = pv[order]
    qs = qv[order]
    cum_p = np.concatenate([[0.0], np.cumsum(ps)])
    cum_q = np.concatenate([[0.0], np.cumsum(qs)])

    def cost(i: int, j: int) -> float:
        return objective.cell_term(cum_p[j] - cum_p[i], cum_q[j] - cum_q[i])

    neg = -math.inf
    # best[d][j]: max total over first j symbols split into d cells
    best = [[neg] * (k + 1) for _ in range(D + 1)]
    back = [[0] * (k + 1) for _ in range(D + 1)]
    best[0][0] = 0.0
    for d in range(1, D + 1):
        for j in range(d, k + 1):
            top = neg
            arg = 0
            for i in range(d - 1, j):
                if best[d - 1][i] == neg:
                    continue
                val = best[d - 1][i] + cost(i, j)
                if val > top:
                    top = val
                    arg = i
            best[d][j] = top
            back[d][j] = arg
    cuts = [k]
    j = k
    for d in range(D, 0, -1):
        j = back[d][j]
        cuts.append(j)
    cuts.reverse()
    for cell, (lo, hi) in enumerate(zip(cuts[:-1], cuts[1:])):
        for pos in range(lo, hi):
            matrix[order[pos], cell] = 1.0
    return Channel(matrix, p.labels, tuple(range(D)))


@dataclass(frozen=True)
class ConstrainedComplexityReport:
    n_unconstrained: int
    n_quantized: int
    D: int
    ratio: float
    ceiling_prior: float  # max(1, log(n*/alpha)/D)
    ceiling_plain: float  # max(1, log(n*)/D)
    fitted_constant: float
    channel: Channel


def constrained_complexity_check(
    p: Distribution,
    q: Distribution,
    alpha: float,
    delta: float,
    D: int,
    n_cap: int = DEFAULT_N_CAP,
) -> ConstrainedComplexityReport:
    """Compare exact complexity with and without a D-output quantizer.

    The quantizer maximizes the skewed Jensen-Shannon divergence (the
    information route); the report carries the communication-cost ceiling
    in both the ``log(n*/alpha)`` and the sharper ``log(n*)`` form.
    """
    inst = TestingInstance.bayesian(p, q, alpha, delta)
    n_star = n_star_bayes_exact(inst, n_cap)
    if n_star is None:
        raise CapacityError("unconstrained search hit the n cap")
    ch = optimal_quantizer_dp(p, q, D, DivergenceObjective("js_alpha", alpha))
    pq = ch.apply(p)
    qq = ch.apply(q)
    n_quant = n_star_bayes_exact(
        TestingInstance.bayesian(pq, qq, alpha, delta), n_cap
    )
    if n_quant is None:
        raise CapacityError("quantized search hit the n cap")
    if n_quant < n_star:
        raise AssertionError(
            "quantization decreased the exact sample complexity "
            f"({n_quant} < {n_star}): data processing violated"
        )
    ratio = n_quant / max(n_star, 1)
    ceiling_prior = max(1.0, math.log(max(n_star, 1) / alpha) / D)
    ceiling_plain = max(1.0, math.log(max(n_star, 1)) / D)
    return ConstrainedComplexityReport(
        n_unconstrained=n_star,
        n_quantized=n_quant,
        D=D,
        ratio=ratio,
        ceiling_prior=ceiling_prior,
        ceiling_plain=ceiling_plain,
        fitted_constant=ratio / ceiling_prior,
        channel=ch,
    )


# -- binary-output local privacy search ---------------------------------------

LDP_MAX_INPUTS = 4
LDP_GRID_STEP = 1.0 / 64.0
LDP_REFINE_FLOOR = 2.0**-20


def _binary_channel(a: np.ndarray, labels, epsilon: float | None) -> Channel:
    matrix = np.stack([1.0 - a, a], axis=1)
    return Channel(matrix, labels, (0, 1), epsilon)


def _binary_feasible(a: np.ndarray, bound: float) -> bool:
    amin, amax = float(a.min()), float(a.max())
    return (
        amax <= bound * amin + LDP_SLACK
        and (1.0 - amin) <= bound * (1.0 - amax) + LDP_SLACK
    )


def _binary_objective(a, pv, qv, objective: DivergenceObjective):
    """Vectorized objective of the 2-output pushforward; a has shape (..., k)."""
    u = a @ pv
    v = a @ qv
    if objective.kind == "h_lambda":
        lam = objective.param
        with np.errstate(invalid="ignore"):
            aff = u**lam * v ** (1.0 - lam) + (1.0 - u) ** lam * (1.0 - v) ** (
                1.0 - lam
            )
        return 1.0 - aff
    alpha = objective.param
    out = np.zeros(np.shape(u))
    with np.errstate(divide="ignore", invalid="ignore"):
        for mass_p, mass_q in ((u, v), (1.0 - u, 1.0 - v)):
            m = alpha * mass_p + (1.0 - alpha) * mass_q
            tp = alpha * mass_p * np.log(mass_p / m)
            tq = (1.0 - alpha) * mass_q * np.log(mass_q / m)
            out = out + np.where(mass_p > 0.0, tp, 0.0)
            out = out + np.where(mass_q > 0.0, tq, 0.0)
    return out


def ldp_brute_optimize(
    p: Distribution,
    q: Distribution,
    epsilon: float,
    D: int = 2,
    objective: DivergenceObjective | None = None,
) -> Channel:
    """Approximately best epsilon-locally-private binary-output channel.

    Feasibility-filtered grid search at step 1/64, seeded with the
    generalized randomized-response corner channels, then coordinate
    descent with step halving down to 2^-20.  Approximate within the final
    step size; the fine-grid oracle in the tests bounds the gap.
    """
    if objective is None:
        objective = DivergenceObjective("h_lambda", 0.5)
    if D != 2:
        raise CapacityError("the desk-scale privacy search supports D=2 only")
    pv, qv = aligned_arrays(p, q)
    k = pv.shape[0]
    if k > LDP_MAX_INPUTS:
        raise CapacityError(
            f"privacy search supports at most {LDP_MAX_INPUTS} inputs, got {k}"
        )
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    bound = math.exp(epsilon) if not math.isinf(epsilon) else math.inf

    grid = np.arange(0.0, 1.0 + LDP_GRID_STEP / 2, LDP_GRID_STEP)
    best_a = np.full(k, 0.5)
    best_val = float(_binary_objective(best_a, pv, qv, objective))

    def consider(cands: np.ndarray) -> None:
        nonlocal best_a, best_val
        if cands.size == 0:
            return
        amin = cands.min(axis=1)
        amax = cands.max(axis=1)
        if math.isinf(bound):
            ok = np.ones(len(cands), dtype=bool)
        else:
            ok = (amax <= bound * amin + LDP_SLACK) & (
                (1.0 - amin) <= bound * (1.0 - amax) + LDP_SLACK
            )
        if not np.any(ok):
            return
        feas = cands[ok]
        vals = _binary_objective(feas, pv, qv, objective)
        idx = int(np.argmax(vals))
        if float(vals[idx]) > best_val:
            best_val = float(vals[idx])
            best_a = feas[idx].copy()

    # coarse grid, chunked over the leading coordinates
    tail = np.array(list(itertools.product(grid, repeat=min(k, 2))))
    if k <= 2:
        consider(tail if k == 2 else grid[:, None])
    else:
        for head in itertools.product(grid, repeat=k - 2):
            block = np.hstack(
                [np.tile(np.asarray(head), (len(tail), 1)), tail]
            )
            consider(block)

    # generalized randomized-response corners plus deterministic maps
    if not math.isinf(bound):
        lo = 1.0 / (1.0 + bound)
        hi = bound / (1.0 + bound)
    else:
        lo, hi = 0.0, 1.0
    corners = np.array(
        [
            [hi if bit else lo for bit in pattern]
            for pattern in itertools.product((0, 1), repeat=k)
        ]
    )
    consider(corners)
    if math.isinf(bound):
        consider(
            np.array(list(itertools.product((0.0, 1.0), repeat=k)))
        )

    # coordinate descent with step halving
    step = LDP_GRID_STEP
    a = best_a.copy()
    while step >= LDP_REFINE_FLOOR:
        improved = False
        for i in range(k):
            for delta in (step, -step):
                cand = a.copy()
                cand[i] = min(1.0, max(0.0, cand[i] + delta))
                if math.isinf(bound) or _binary_feasible(cand, bound):
                    val = float(_binary_objective(cand, pv, qv, objective))
                    if val > best_val + 1e-18:
                        best_val = val
                        a = cand
                        improved = True
        if not improved:
            step /= 2.0
    eps_tag = None if math.isinf(epsilon) else epsilon
    return _binary_channel(a, p.labels, eps_tag)


# -- robust least-favorable pair ----------------------------------------------


@dataclass(frozen=True)
class LfdPair:
    """Least favorable pair in total-variation balls of radius epsilon.

    The likelihood ratio of (p', q') is the ratio of (p, q) clipped to
    [clip_lo, clip_hi]; on each clipped region both members are
    proportional to p + q, which moves exactly epsilon of mass for each.
    """

    p_prime: Distribution
    q_prime: Distribution
    epsilon: float
    clip_lo: float
    clip_hi: float
    tv_p: float
    tv_q: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "p_prime": json.loads(self.p_prime.to_json()),
                "q_prime": json.loads(self.q_prime.to_json()),
                "epsilon": self.epsilon,
                "clip_lo": self.clip_lo,
                "clip_hi": self.clip_hi,
                "tv_p": self.tv_p,
                "tv_q": self.tv_q,
            }
        )


def _clip_budget_hi(pv, qv, c):
    """Mass shed from p when the ratio is clipped above at c."""
    return float(np.maximum(pv - c * qv, 0.0).sum())


def _clip_budget_lo(pv, qv, c):
    """Mass added to p when the ratio is clipped below at c."""
    return float(np.maximum(c * qv - pv, 0.0).sum())


def huber_lfd(p: Distribution, q: Distribution, epsilon: float) -> LfdPair:
    """Clipped-likelihood-ratio least favorable pair for radius epsilon.

    The clip thresholds solve the budget equations
    ``sum (p - c q)_+ = eps (1 + c)`` (upper) and
    ``sum (c q - p)_+ = eps (1 + c)`` (lower), each by root finding to
    1e-12; the construction then satisfies TV(p, p') = TV(q, q') = eps
    exactly.
    """
    pv, qv = aligned_arrays(p, q)
    tv = classic_divergences(p, q).tv
    if not 0.0 < epsilon < tv / 2.0:
        raise DomainError(
            f"epsilon={epsilon} outside (0, TV/2) with TV={tv}: the "
            "contamination balls overlap and testing is impossible"
        )

    def g_hi(c):
        return _clip_budget_hi(pv, qv, c) - epsilon * (1.0 + c)

    def g_lo(c):
        return _clip_budget_lo(pv, qv, c) - epsilon * (1.0 + c)

    hi_bracket = 1.0
    with np.errstate(divide="ignore"):
        ratios = np.where(qv > 0, pv / np.maximum(qv, 1e-300), np.inf)
    finite_ratios = ratios[np.isfinite(ratios) & (pv > 0)]
    if finite_ratios.size:
        hi_bracket = max(1.0, float(finite_ratios.max()))
    while g_hi(hi_bracket) > 0.0:
        hi_bracket *= 2.0
    c_hi = float(brentq(g_hi, 1.0, hi_bracket, xtol=1e-15, rtol=8.9e-16))
    c_lo = float(brentq(g_lo, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16))
    if abs(g_hi(c_hi)) > 1e-12 or abs(g_lo(c_lo)) > 1e-12:
        raise AssertionError("clip-budget equations did not converge to 1e-12")

    mix = pv + qv
    above = pv > c_hi * qv
    below = c_lo * qv > pv
    p_new = pv.copy()
    q_new = qv.copy()
    p_new[above] = c_hi * mix[above] / (1.0 + c_hi)
    q_new[above] = mix[above] / (1.0 + c_hi)
    p_new[below] = c_lo * mix[below] / (1.0 + c_lo)
    q_new[below] = mix[below] / (1.0 + c_lo)
    p_prime = Distribution(tuple(p_new), p.labels)
    q_prime = Distribution(tuple(q_new), q.labels)
    return LfdPair(
        p_prime=p_prime,
        q_prime=q_prime,
        epsilon=epsilon,
        clip_lo=c_lo,
        clip_hi=c_hi,
        tv_p=classic_divergences(p, p_prime).tv,
        tv_q=classic_divergences(q, q_prime).tv,
    )
