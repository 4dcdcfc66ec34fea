"""Divergences and information quantities on finite distributions.

All divergences here are f-divergences evaluated with the standard zero
conventions ``0 f(0/0) = 0`` and ``0 f(a/0) = a lim f(u)/u``; every kernel
spells the convention out explicitly instead of relying on IEEE accidents.
Sums use compensated summation (``math.fsum``).

Squared Hellinger convention: ``hellinger_sq`` is the *normalized* form

    h2(p, q) = 0.5 * sum_i (sqrt(p_i) - sqrt(q_i))**2 = 1 - sum_i sqrt(p_i q_i)

so it lives in [0, 1] and coincides with :func:`h_lambda` at ``lam = 1/2``.
The un-halved form ``sum (sqrt(p)-sqrt(q))**2`` is twice this value; both
appear in the literature, and the equality above is asserted by the test
suite at 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import Distribution, aligned_arrays
from .errors import DomainError

#: tolerance for exact algebraic identities (no logs involved)
EXACT_TOL = 1e-12
#: tolerance for cross-derivations that go through logs
LOG_TOL = 1e-10


@dataclass(frozen=True)
class PriorParams:
    """Prior mass on the first hypothesis and the induced skew parameter.

    ``gamma_skew`` is the hockey-stick parameter; it equals
    ``(1 - alpha) / alpha`` when derived from a prior ``alpha <= 1/2``.
    """

    alpha: float
    gamma_skew: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha={self.alpha} outside (0, 1)")
        if self.gamma_skew < 1.0:
            raise DomainError(f"gamma_skew={self.gamma_skew} must be >= 1")

    @classmethod
    def from_alpha(cls, alpha: float) -> "PriorParams":
        if not 0.0 < alpha <= 0.5:
            raise DomainError(f"alpha={alpha} outside (0, 1/2]")
        return cls(alpha, (1.0 - alpha) / alpha)


@dataclass(frozen=True)
class LambdaParam:
    """Hellinger-family exponent, optionally tied to a prior via lam = r / log(1/alpha)."""

    lam: float
    r: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.lam < 1.0:
            raise DomainError(f"lambda={self.lam} outside (0, 1)")
        if self.r is not None and self.r < 0:
            raise DomainError("r must be nonnegative")

    def __float__(self) -> float:
        return self.lam

    @property
    def lam_bar(self) -> float:
        return 1.0 - self.lam


def lambda_for_prior(alpha: float) -> LambdaParam:
    """Canonical exponent ``lam = 0.5 log 2 / log(1/alpha)`` for a prior.

    The denominator is floored at ``log 2`` so ``lam <= 1/2`` always holds;
    at ``alpha = 1/2`` this gives ``lam = 1/2`` exactly.
    """
    if not 0.0 < alpha <= 0.5:
        raise DomainError(f"alpha={alpha} outside (0, 1/2]")
    denom = max(math.log(1.0 / alpha), math.log(2.0))
    r = 0.5 * math.log(2.0)
    return LambdaParam(r / denom, r)


@dataclass(frozen=True)
class ClassicDivergences:
    tv: float
    hellinger_sq: float
    kl_pq: float


def classic_divergences(p: Distribution, q: Distribution) -> ClassicDivergences:
    """Total variation, normalized squared Hellinger, and KL(p, q).

    KL convention: a term with ``p_i > 0 = q_i`` makes the divergence
    infinite; ``p_i = 0`` terms contribute 0.
    """
    pv, qv = aligned_arrays(p, q)
    tv = 0.5 * math.fsum(abs(a - b) for a, b in zip(pv, qv))
    hell = 0.5 * math.fsum(
        (math.sqrt(a) - math.sqrt(b)) ** 2 for a, b in zip(pv, qv)
    )
    kl = 0.0
    terms = []
    for a, b in zip(pv, qv):
        if a > 0.0 and b == 0.0:
            kl = math.inf
            break
        if a > 0.0:
            terms.append(a * math.log(a / b))
    else:
        kl = max(0.0, math.fsum(terms))
    return ClassicDivergences(
        tv=min(max(tv, 0.0), 1.0), hellinger_sq=min(max(hell, 0.0), 1.0), kl_pq=kl
    )


def h_lambda(p: Distribution, q: Distribution, lam: float | LambdaParam) -> float:
    """Hellinger-family divergence ``1 - sum_i p_i**lam q_i**(1-lam)``.

    Convention ``0**lam * x**(1-lam) = 0``: any symbol missing from either
    support contributes nothing to the affinity.
    """
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda={lam} outside (0, 1)")
    pv, qv = aligned_arrays(p, q)
    affinity = math.fsum(
        a**lam * b ** (1.0 - lam) for a, b in zip(pv, qv) if a > 0.0 and b > 0.0
    )
    return min(max(1.0 - affinity, 0.0), 1.0)


def js_alpha(p: Distribution, q: Distribution, alpha: float) -> float:
    """Skewed Jensen-Shannon divergence.

    ``alpha * KL(p, m) + (1 - alpha) * KL(q, m)`` with mixture
    ``m = alpha p + (1 - alpha) q``.  Always finite since the mixture
    dominates both arguments.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha} outside (0, 1)")
    pv, qv = aligned_arrays(p, q)
    terms = []
    for a, b in zip(pv, qv):
        m = alpha * a + (1.0 - alpha) * b
        if a > 0.0:
            terms.append(alpha * a * math.log(a / m))
        if b > 0.0:
            terms.append((1.0 - alpha) * b * math.log(b / m))
    return max(0.0, math.fsum(terms))


def e_gamma(p: Distribution, q: Distribution, gamma: float) -> float:
    """Hockey-stick divergence ``sum_i (p_i - gamma q_i)_+`` for gamma >= 1.

    At ``gamma = 1`` this is the total variation distance.
    """
    if gamma < 1.0:
        raise DomainError(f"gamma={gamma} must be >= 1")
    pv, qv = aligned_arrays(p, q)
    val = math.fsum(max(a - gamma * b, 0.0) for a, b in zip(pv, qv))
    return min(max(val, 0.0), 1.0)


def shannon_entropy(probs) -> float:
    """Shannon entropy in nats with the 0 log 0 = 0 convention."""
    return -math.fsum(x * math.log(x) for x in probs if x > 0.0)


def mutual_info_binary(p: Distribution, q: Distribution, alpha: float) -> float:
    """Mutual information between a Ber(alpha)-weighted label and one sample.

    Computed through the entropy decomposition
    ``H(alpha p + (1-alpha) q) - alpha H(p) - (1-alpha) H(q)``; this is an
    independent route that must agree with :func:`js_alpha` to 1e-10.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha} outside (0, 1)")
    pv, qv = aligned_arrays(p, q)
    mix = [alpha * a + (1.0 - alpha) * b for a, b in zip(pv, qv)]
    val = (
        shannon_entropy(mix)
        - alpha * shannon_entropy(pv)
        - (1.0 - alpha) * shannon_entropy(qv)
    )
    return max(0.0, val)


def tensorize_h_lambda(h_val: float, n: int) -> float:
    """Hellinger-family divergence of the n-fold product: ``1 - (1 - h)**n``."""
    if not 0.0 <= h_val <= 1.0:
        raise DomainError(f"h_val={h_val} outside [0, 1]")
    if n < 0:
        raise DomainError("n must be nonnegative")
    return 1.0 - (1.0 - h_val) ** n


def binary_entropy(x: float) -> float:
    """Entropy of a two-point distribution with mass x, in nats."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    out = 0.0
    if x > 0.0:
        out -= x * math.log(x)
    if x < 1.0:
        out -= (1.0 - x) * math.log(1.0 - x)
    return out
