"""Numpy implementations of the hot table-construction kernels.

These are the reference implementations; ``_ckernels`` is a compiled twin
with identical semantics.  All kernels work on strictly finite inputs —
the caller strips zero-probability symbols and reattaches the +/-inf
log-likelihood-ratio atoms afterwards.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

BACKEND_NAME = "numpy"


def compositions(n: int, k: int) -> np.ndarray:
    """All length-k tuples of nonnegative ints summing to n, shape (M, k).

    Rows are emitted with the leading coordinate decreasing, matching the
    compiled kernel's enumeration order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return np.array([[n]], dtype=np.int64)
    if k == 2:
        c0 = np.arange(n, -1, -1, dtype=np.int64)
        return np.stack([c0, n - c0], axis=1)
    blocks = []
    for c0 in range(n, -1, -1):
        rest = compositions(n - c0, k - 1)
        first = np.full((rest.shape[0], 1), c0, dtype=np.int64)
        blocks.append(np.hstack([first, rest]))
    return np.vstack(blocks)


def typeclass_atoms(
    logp: np.ndarray, logq: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact n-sample log-likelihood-ratio atoms via type-class enumeration.

    Returns unmerged, unsorted arrays ``(llr, p_mass, q_mass)`` with one
    atom per type class; masses are multinomial-weighted products of the
    single-sample probabilities.
    """
    logp = np.asarray(logp, dtype=np.float64)
    logq = np.asarray(logq, dtype=np.float64)
    k = logp.shape[0]
    comps = compositions(n, k)
    cf = comps.astype(np.float64)
    logfact = gammaln(np.arange(n + 1, dtype=np.float64) + 1.0)
    logw = logfact[n] - logfact[comps].sum(axis=1)
    lp = logw + cf @ logp
    lq = logw + cf @ logq
    return lp - lq, np.exp(lp), np.exp(lq)


def convolve_atoms(
    l1: np.ndarray,
    p1: np.ndarray,
    q1: np.ndarray,
    l2: np.ndarray,
    p2: np.ndarray,
    q2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Outer-sum convolution of two finite atom sets (unmerged)."""
    llr = (l1[:, None] + l2[None, :]).ravel()
    pm = (p1[:, None] * p2[None, :]).ravel()
    qm = (q1[:, None] * q2[None, :]).ravel()
    return llr, pm, qm


def bucket_merge(
    llr: np.ndarray, pm: np.ndarray, qm: np.ndarray, tol: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Merge atoms whose llr values fall in the same width-``tol`` bucket.

    Atoms merged together are at most ``tol`` apart; the merged llr is the
    (p+q)-mass-weighted mean of the members.  Output is sorted by llr and
    contains no zero-mass atoms.
    """
    keep = (pm > 0.0) | (qm > 0.0)
    llr, pm, qm = llr[keep], pm[keep], qm[keep]
    if llr.size == 0:
        return llr, pm, qm
    keys = np.floor(llr / tol).astype(np.int64)
    order = np.argsort(keys, kind="stable")
    keys, llr, pm, qm = keys[order], llr[order], pm[order], qm[order]
    starts = np.concatenate([[0], np.flatnonzero(np.diff(keys)) + 1])
    psum = np.add.reduceat(pm, starts)
    qsum = np.add.reduceat(qm, starts)
    w = pm + qm
    wsum = np.add.reduceat(w, starts)
    lsum = np.add.reduceat(llr * w, starts)
    lmerged = lsum / wsum
    return lmerged, psum, qsum
