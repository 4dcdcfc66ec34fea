import numpy as np
import pytest

from bhtlab.distributions import Distribution
from bhtlab.divergences import classic_divergences


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_distribution(rng, k: int, allow_zeros: bool = False) -> Distribution:
    probs = rng.dirichlet(np.ones(k))
    if allow_zeros and k > 2 and rng.random() < 0.3:
        idx = int(rng.integers(0, k))
        probs[idx] = 0.0
        probs = probs / probs.sum()
    return Distribution.from_probs(probs)


def random_pair_with_h2(rng, k: int, lo: float, hi: float, max_tries: int = 500):
    """A random aligned pair whose squared Hellinger lands in [lo, hi].

    Mixes a second draw into the first with a random weight and rejects
    until the separation falls in the requested band.
    """
    for _ in range(max_tries):
        base = rng.dirichlet(np.ones(k))
        other = rng.dirichlet(np.ones(k))
        t = rng.uniform(0.05, 0.9)
        mixed = (1.0 - t) * base + t * other
        p = Distribution.from_probs(mixed)
        q = Distribution.from_probs(base)
        h2 = classic_divergences(p, q).hellinger_sq
        if lo < h2 <= hi:
            return p, q, h2
    raise AssertionError(f"no pair with hellinger_sq in ({lo}, {hi}] after {max_tries} tries")
