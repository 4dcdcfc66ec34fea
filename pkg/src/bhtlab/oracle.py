"""Exact error probabilities and sample complexities by search.

The exact n-sample distribution of the log-likelihood ratio is computed by
type-class enumeration when the class count ``C(n+k-1, k-1)`` fits under
``TYPECLASS_CAP``, and otherwise by iterative single-sample convolution
that merges atoms whose llr values differ by at most ``MERGE_TOL``.  The
type-class path is the exact reference; the merge tolerance is the single
documented source of controlled inexactness.

Atoms with llr exactly +inf (mass only under p) or -inf (mass only under
q) are represented explicitly — never as large floats — so families with
partially disjoint supports are handled exactly.

Minimal-n searches assume the optimal error probability is non-increasing
in n.  This is justified by discarding extra samples (any test on n
samples is a test on n+1 that ignores one); it is asserted as a tested
invariant rather than proved here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .distributions import Distribution, aligned_arrays
from .divergences import shannon_entropy
from .errors import CapacityError, DomainError

TYPECLASS_CAP = 2_000_000
CONV_ATOM_CAP = 2_000_000
MERGE_TOL = 1e-9
DEFAULT_N_CAP = 100_000


@dataclass(frozen=True)
class LlrAtomTable:
    """Exact distribution of the n-sample log-likelihood ratio.

    ``llr`` is sorted ascending and may start with -inf and end with +inf;
    ``p_mass``/``q_mass`` are the probabilities of each atom under the two
    hypotheses, each summing to 1.
    """

    llr: np.ndarray
    p_mass: np.ndarray
    q_mass: np.ndarray
    n: int

    def __post_init__(self) -> None:
        for arr in (self.llr, self.p_mass, self.q_mass):
            arr.flags.writeable = False

    @property
    def size(self) -> int:
        return self.llr.shape[0]

    def validate(self) -> None:
        """Check the structural invariants; raises AssertionError on failure."""
        llr, pm, qm = self.llr, self.p_mass, self.q_mass
        assert abs(math.fsum(pm) - 1.0) <= 1e-12, "p masses must sum to 1"
        assert abs(math.fsum(qm) - 1.0) <= 1e-12, "q masses must sum to 1"
        assert np.all(np.diff(llr) > 0), "atoms must be sorted by llr"
        finite = np.isfinite(llr)
        assert np.all(qm[llr == np.inf] == 0.0), "+inf atoms carry no q mass"
        assert np.all(pm[llr == -np.inf] == 0.0), "-inf atoms carry no p mass"
        ratio = np.exp(llr[finite]) * qm[finite]
        assert np.allclose(ratio, pm[finite], rtol=2e-9, atol=0.0), (
            "exp(llr) * q_mass must reproduce p_mass on finite atoms"
        )

    # -- exact functionals ---------------------------------------------------

    def bayes_error(self, alpha: float) -> float:
        """Minimum prior-weighted error: per-atom min of weighted masses."""
        return float(
            np.minimum(alpha * self.p_mass, (1.0 - alpha) * self.q_mass).sum()
        )

    def e_gamma(self, gamma: float) -> float:
        """Hockey-stick divergence of the two product distributions."""
        return float(np.maximum(self.p_mass - gamma * self.q_mass, 0.0).sum())

    def np_beta(self, alpha_t1: float) -> float:
        """Exact minimum type-II error at type-I error <= alpha_t1.

        Scans the atoms in decreasing llr order, accepting the first
        hypothesis on a prefix and splitting one boundary atom fractionally
        (randomized threshold test).  The rejected p-mass is tracked as a
        tail sum so its rounding error stays relative to the tail itself;
        a head-sum formulation would amplify the noise by the inverse
        likelihood ratio at the boundary atom.
        """
        if not 0.0 <= alpha_t1 <= 1.0:
            raise DomainError(f"alpha_t1={alpha_t1} outside [0, 1]")
        pm = self.p_mass[::-1]
        qm = self.q_mass[::-1]
        # tail[j] = rejected p-mass when accepting atoms 0..j-1 outright
        tail = np.concatenate([np.cumsum(pm[::-1])[::-1], [0.0]])
        j = int(np.searchsorted(-tail[1:], -alpha_t1))
        rho = 0.0
        if pm[j] > 0.0:
            rho = min(1.0, max(0.0, (float(tail[j]) - alpha_t1) / float(pm[j])))
        beta = float(np.sum(qm[:j])) + rho * float(qm[j])
        return min(max(beta, 0.0), 1.0)


@dataclass(frozen=True)
class TestingInstance:
    """A testing problem: a pair of hypotheses plus regime parameters."""

    __test__ = False  # domain type, not a pytest collectable

    p: Distribution
    q: Distribution
    kind: Literal["bayesian", "prior_free"]
    alpha: float | None = None
    delta: float | None = None
    alpha_t1: float | None = None
    beta_t2: float | None = None

    def __post_init__(self) -> None:
        self.p.aligned_with(self.q)
        if self.kind == "bayesian":
            if self.alpha is None or self.delta is None:
                raise DomainError("bayesian instance needs alpha and delta")
            if not 0.0 < self.alpha <= 0.5:
                raise DomainError(f"alpha={self.alpha} outside (0, 1/2]")
            if not 0.0 < self.delta < 1.0:
                raise DomainError(f"delta={self.delta} outside (0, 1)")
        elif self.kind == "prior_free":
            if self.alpha_t1 is None or self.beta_t2 is None:
                raise DomainError("prior_free instance needs alpha_t1 and beta_t2")
            for name, val in (("alpha_t1", self.alpha_t1), ("beta_t2", self.beta_t2)):
                if not 0.0 < val < 1.0:
                    raise DomainError(f"{name}={val} outside (0, 1)")
        else:
            raise DomainError(f"unknown instance kind {self.kind!r}")

    @classmethod
    def bayesian(cls, p, q, alpha, delta) -> "TestingInstance":
        return cls(p, q, "bayesian", alpha=alpha, delta=delta)

    @classmethod
    def prior_free(cls, p, q, alpha_t1, beta_t2) -> "TestingInstance":
        return cls(p, q, "prior_free", alpha_t1=alpha_t1, beta_t2=beta_t2)


def _finite_parts(pv: np.ndarray, qv: np.ndarray):
    """Split supports into both-positive, p-only, and q-only masses."""
    both = (pv > 0.0) & (qv > 0.0)
    p_only = float(math.fsum(pv[(pv > 0.0) & (qv == 0.0)]))
    q_only = float(math.fsum(qv[(qv > 0.0) & (pv == 0.0)]))
    return both, p_only, q_only


def build_llr_table(p: Distribution, q: Distribution, n: int) -> LlrAtomTable:
    """Exact distribution of the n-sample llr under both hypotheses.

    Raises :class:`CapacityError` when the type-class count exceeds
    ``TYPECLASS_CAP`` and the convolution path exceeds ``CONV_ATOM_CAP``
    merged atoms.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    pv, qv = aligned_arrays(p, q)
    both, p_only, q_only = _finite_parts(pv, qv)
    p_both = float(math.fsum(pv[both]))
    q_both = float(math.fsum(qv[both]))

    if np.any(both):
        logp0 = np.log(pv[both])
        logq0 = np.log(qv[both])
        k0 = int(both.sum())
        classes = math.comb(n + k0 - 1, k0 - 1)
        if classes <= TYPECLASS_CAP:
            llr, pm, qm = _kernels.typeclass_atoms(logp0, logq0, n)
            llr, pm, qm = _kernels.bucket_merge(llr, pm, qm, MERGE_TOL)
        else:
            base = _kernels.bucket_merge(
                logp0 - logq0, pv[both].copy(), qv[both].copy(), MERGE_TOL
            )
            llr, pm, qm = base
            for _ in range(n - 1):
                llr, pm, qm = _kernels.bucket_merge(
                    *_kernels.convolve_atoms(llr, pm, qm, *base), MERGE_TOL
                )
                if llr.shape[0] > CONV_ATOM_CAP:
                    raise CapacityError(
                        f"type-class count {classes} > {TYPECLASS_CAP} and "
                        f"convolution produced > {CONV_ATOM_CAP} merged atoms"
                    )
        # Pin the finite totals to the exact closed forms so the table's
        # masses sum to 1 regardless of accumulation error.
        target_p = p_both**n
        target_q = q_both**n
        sp = float(np.sum(pm))
        sq = float(np.sum(qm))
        if sp > 0.0:
            pm = pm * (target_p / sp)
        if sq > 0.0:
            qm = qm * (target_q / sq)
    else:
        llr = np.empty(0)
        pm = np.empty(0)
        qm = np.empty(0)
        target_p = 0.0
        target_q = 0.0

    parts_l = [llr]
    parts_p = [pm]
    parts_q = [qm]
    if q_only > 0.0:
        parts_l.insert(0, np.array([-np.inf]))
        parts_p.insert(0, np.array([0.0]))
        parts_q.insert(0, np.array([1.0 - target_q]))
    if p_only > 0.0:
        parts_l.append(np.array([np.inf]))
        parts_p.append(np.array([1.0 - target_p]))
        parts_q.append(np.array([0.0]))
    return LlrAtomTable(
        llr=np.concatenate(parts_l),
        p_mass=np.concatenate(parts_p),
        q_mass=np.concatenate(parts_q),
        n=n,
    )


def bayes_error_exact(
    p: Distribution, q: Distribution, alpha: float, n: int
) -> float:
    """Exact minimum prior-weighted error with n i.i.d. samples.

    Equal to ``alpha * (1 - E_gamma(p^n, q^n))`` at ``gamma = (1-alpha)/alpha``,
    evaluated as the per-atom min-sum; ``n = 0`` returns ``min(alpha, 1-alpha)``.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha} outside (0, 1)")
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return min(alpha, 1.0 - alpha)
    return build_llr_table(p, q, n).bayes_error(alpha)


def np_curve_point(
    p: Distribution, q: Distribution, n: int, alpha_t1: float
) -> float:
    """Exact minimum type-II error of the best randomized test at level alpha_t1."""
    if not 0.0 <= alpha_t1 <= 1.0:
        raise DomainError(f"alpha_t1={alpha_t1} outside [0, 1]")
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return max(0.0, 1.0 - alpha_t1)
    return build_llr_table(p, q, n).np_beta(alpha_t1)


def _instance_capacity(p: Distribution, q: Distribution) -> int:
    pv, qv = aligned_arrays(p, q)
    k0 = int(((pv > 0.0) & (qv > 0.0)).sum())
    return exact_capacity_n(max(k0, 1))


def exact_capacity_n(k_positive: int, cap: int = TYPECLASS_CAP) -> int:
    """Largest n whose type-class count stays within the enumeration cap.

    ``k_positive`` counts the symbols carrying mass under both hypotheses;
    useful for sizing instances that must stay oracle-feasible.
    """
    if k_positive < 1:
        raise DomainError("k_positive must be >= 1")
    if k_positive <= 2:
        return cap - 1
    n = 1
    while math.comb(2 * n + k_positive - 1, k_positive - 1) <= cap:
        n *= 2
    lo, hi = n, 2 * n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if math.comb(mid + k_positive - 1, k_positive - 1) <= cap:
            lo = mid
        else:
            hi = mid
    return lo


def _search_min_n(
    err_at, threshold: float, n_cap: int, trace=None, capacity_hint: int | None = None
):
    """Smallest n with err_at(n) <= threshold, by doubling then bisection.

    Valid because err_at is non-increasing in n.  Returns None when the
    cap is reached without success; raises :class:`CapacityError` when the
    error is still above threshold at the largest exactly-evaluable n.
    ``capacity_hint`` (the type-class frontier) lets the search fail fast
    instead of probing the expensive convolution fallback repeatedly.
    """

    def attempt(n: int):
        try:
            e = err_at(n)
        except CapacityError:
            return None
        if trace is not None:
            trace.append((n, e))
        return e

    if attempt(0) <= threshold:
        return 0
    lo, hi = 0, 1
    passing_hi = None
    while passing_hi is None:
        if capacity_hint is not None and hi > capacity_hint and lo < capacity_hint:
            # jump to the cheap frontier before paying for fallback probes
            eb = attempt(capacity_hint)
            if eb is not None and eb <= threshold:
                passing_hi = capacity_hint
                break
            if eb is not None:
                raise CapacityError(
                    "exact search exceeded capacity: error still above "
                    f"target at n={capacity_hint}, the type-class frontier"
                )
            hi = capacity_hint  # hint was optimistic; fall through
        e = attempt(hi)
        if e is None:
            # over capacity: find the largest evaluable size in (lo, hi)
            lo2, hi2 = lo, hi
            while hi2 - lo2 > 1:
                mid = (lo2 + hi2) // 2
                em = attempt(mid)
                if em is None:
                    hi2 = mid
                elif em <= threshold:
                    passing_hi = mid
                    break
                else:
                    lo2 = mid
            if passing_hi is None:
                raise CapacityError(
                    "exact search exceeded capacity: error still above "
                    f"target at n={lo2}, the largest exactly evaluable size"
                )
            lo = lo2
        elif e <= threshold:
            passing_hi = hi
        else:
            lo = hi
            if hi >= n_cap:
                return None
            hi = min(2 * hi, n_cap)
    hi = passing_hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        em = attempt(mid)
        if em is None:
            raise CapacityError("exact evaluation lost capacity between brackets")
        if em <= threshold:
            hi = mid
        else:
            lo = mid
    return hi


def n_star_bayes_exact(
    inst: TestingInstance, n_cap: int = DEFAULT_N_CAP, trace: list | None = None
):
    """Smallest n whose exact prior-weighted error is at most delta.

    Returns 0 in the vacuous regime ``delta >= min(alpha, 1-alpha)`` and
    None when the error stays above delta up to ``n_cap``.
    """
    if inst.kind != "bayesian":
        raise DomainError("expected a bayesian instance")
    return _search_min_n(
        lambda n: bayes_error_exact(inst.p, inst.q, inst.alpha, n),
        inst.delta,
        n_cap,
        trace,
        capacity_hint=_instance_capacity(inst.p, inst.q),
    )


def n_star_pf_exact(
    inst: TestingInstance, n_cap: int = DEFAULT_N_CAP, trace: list | None = None
):
    """Smallest n with exact type-II error <= beta_t2 at type-I <= alpha_t1.

    Returns 0 in the vacuous regime ``alpha_t1 + beta_t2 >= 1`` and None
    past ``n_cap``.
    """
    if inst.kind != "prior_free":
        raise DomainError("expected a prior_free instance")
    return _search_min_n(
        lambda n: np_curve_point(inst.p, inst.q, n, inst.alpha_t1),
        inst.beta_t2,
        n_cap,
        trace,
        capacity_hint=_instance_capacity(inst.p, inst.q),
    )


def mutual_info_product(
    p: Distribution, q: Distribution, alpha: float, n: int
) -> float:
    """Exact mutual information between the label and n joint samples.

    Enumerates type classes of the full mixture support; subadditivity
    bounds it by ``n * js_alpha(p, q, alpha)``.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha} outside (0, 1)")
    if n < 1:
        raise DomainError("n must be >= 1")
    pv, qv = aligned_arrays(p, q)
    support = (pv > 0.0) | (qv > 0.0)
    pv, qv = pv[support], qv[support]
    k = int(support.sum())
    classes = math.comb(n + k - 1, k - 1)
    if classes > TYPECLASS_CAP:
        raise CapacityError(
            f"type-class count {classes} exceeds {TYPECLASS_CAP} for exact "
            "joint enumeration"
        )
    comps = _kernels.compositions(n, k)
    cf = comps.astype(np.float64)
    logfact = gammaln(np.arange(n + 1, dtype=np.float64) + 1.0)
    log_count = logfact[n] - logfact[comps].sum(axis=1)
    with np.errstate(invalid="ignore"):
        logp = np.where(pv > 0.0, np.log(np.maximum(pv, 1e-300)), -np.inf)
        logq = np.where(qv > 0.0, np.log(np.maximum(qv, 1e-300)), -np.inf)
        lp_seq = np.where(comps > 0, cf * logp[None, :], 0.0).sum(axis=1)
        lq_seq = np.where(comps > 0, cf * logq[None, :], 0.0).sum(axis=1)
    p_seq = np.exp(lp_seq)
    q_seq = np.exp(lq_seq)
    m_seq = alpha * p_seq + (1.0 - alpha) * q_seq
    pos = m_seq > 0.0
    log_m = np.log(m_seq[pos])
    h_mix = -float(np.sum(np.exp(log_count[pos] + log_m) * log_m))
    h_cond = n * (
        alpha * shannon_entropy(pv) + (1.0 - alpha) * shannon_entropy(qv)
    )
    return max(0.0, h_mix - h_cond)
