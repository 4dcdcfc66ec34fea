# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the numpy kernels: composition enumeration fused with
mass computation, plus the convolve and bucket-merge passes.

Semantics match ``_pykernels`` (same enumeration order, same merge rule);
the test suite asserts agreement at 1e-12.
"""

from libc.math cimport exp, floor, lgamma

import numpy as np

BACKEND_NAME = "cython"


def typeclass_atoms(object logp_obj, object logq_obj, long n):
    """Exact n-sample llr atoms over strictly positive single-sample probs."""
    logp_arr = np.ascontiguousarray(logp_obj, dtype=np.float64)
    logq_arr = np.ascontiguousarray(logq_obj, dtype=np.float64)
    cdef double[::1] logp = logp_arr
    cdef double[::1] logq = logq_arr
    cdef Py_ssize_t k = logp.shape[0]

    cdef object m_obj = 1
    import math as _math
    m_obj = _math.comb(n + k - 1, k - 1)
    cdef Py_ssize_t m = m_obj

    llr_arr = np.empty(m, dtype=np.float64)
    pm_arr = np.empty(m, dtype=np.float64)
    qm_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] llr = llr_arr
    cdef double[::1] pm = pm_arr
    cdef double[::1] qm = qm_arr

    lf_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] lf = lf_arr
    cdef Py_ssize_t i
    for i in range(n + 1):
        lf[i] = lgamma(i + 1.0)

    counts_arr = np.zeros(k, dtype=np.int64)
    cdef long[::1] c = counts_arr
    c[0] = n

    cdef Py_ssize_t idx = 0, j
    cdef long tail
    cdef double logw, lp, lq
    while True:
        logw = lf[n]
        lp = 0.0
        lq = 0.0
        for j in range(k):
            logw -= lf[c[j]]
            lp += c[j] * logp[j]
            lq += c[j] * logq[j]
        lp += logw
        lq += logw
        llr[idx] = lp - lq
        pm[idx] = exp(lp)
        qm[idx] = exp(lq)
        idx += 1
        # advance to the next composition (leading coordinate decreasing)
        j = k - 2
        while j >= 0 and c[j] == 0:
            j -= 1
        if j < 0:
            break
        tail = c[k - 1]
        c[j] -= 1
        c[j + 1] = tail + 1
        if j + 1 != k - 1:
            c[k - 1] = 0
    return llr_arr[:idx], pm_arr[:idx], qm_arr[:idx]


def convolve_atoms(object l1, object p1, object q1,
                   object l2, object p2, object q2):
    """Outer-sum convolution of two finite atom sets (unmerged)."""
    cdef double[::1] a_l = np.ascontiguousarray(l1, dtype=np.float64)
    cdef double[::1] a_p = np.ascontiguousarray(p1, dtype=np.float64)
    cdef double[::1] a_q = np.ascontiguousarray(q1, dtype=np.float64)
    cdef double[::1] b_l = np.ascontiguousarray(l2, dtype=np.float64)
    cdef double[::1] b_p = np.ascontiguousarray(p2, dtype=np.float64)
    cdef double[::1] b_q = np.ascontiguousarray(q2, dtype=np.float64)
    cdef Py_ssize_t na = a_l.shape[0], nb = b_l.shape[0]
    out_l = np.empty(na * nb, dtype=np.float64)
    out_p = np.empty(na * nb, dtype=np.float64)
    out_q = np.empty(na * nb, dtype=np.float64)
    cdef double[::1] ol = out_l
    cdef double[::1] op = out_p
    cdef double[::1] oq = out_q
    cdef Py_ssize_t i, j, idx = 0
    for i in range(na):
        for j in range(nb):
            ol[idx] = a_l[i] + b_l[j]
            op[idx] = a_p[i] * b_p[j]
            oq[idx] = a_q[i] * b_q[j]
            idx += 1
    return out_l, out_p, out_q


def bucket_merge(object llr_obj, object pm_obj, object qm_obj, double tol):
    """Merge atoms sharing a width-``tol`` bucket; weighted-mean llr."""
    llr_in = np.ascontiguousarray(llr_obj, dtype=np.float64)
    pm_in = np.ascontiguousarray(pm_obj, dtype=np.float64)
    qm_in = np.ascontiguousarray(qm_obj, dtype=np.float64)
    keep = (pm_in > 0.0) | (qm_in > 0.0)
    llr_in = llr_in[keep]
    pm_in = pm_in[keep]
    qm_in = qm_in[keep]
    if llr_in.size == 0:
        return llr_in, pm_in, qm_in
    keys = np.floor(llr_in / tol).astype(np.int64)
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    llr_s = llr_in[order]
    pm_s = pm_in[order]
    qm_s = qm_in[order]

    cdef long[::1] kv = keys
    cdef double[::1] lv = llr_s
    cdef double[::1] pv = pm_s
    cdef double[::1] qv = qm_s
    cdef Py_ssize_t ntot = kv.shape[0]
    out_l = np.empty(ntot, dtype=np.float64)
    out_p = np.empty(ntot, dtype=np.float64)
    out_q = np.empty(ntot, dtype=np.float64)
    cdef double[::1] ol = out_l
    cdef double[::1] op = out_p
    cdef double[::1] oq = out_q

    cdef Py_ssize_t i = 0, m = 0
    cdef long cur
    cdef double ps, qs, ws, ls, w
    while i < ntot:
        cur = kv[i]
        ps = 0.0
        qs = 0.0
        ws = 0.0
        ls = 0.0
        while i < ntot and kv[i] == cur:
            w = pv[i] + qv[i]
            ps += pv[i]
            qs += qv[i]
            ws += w
            ls += lv[i] * w
            i += 1
        ol[m] = ls / ws
        op[m] = ps
        oq[m] = qs
        m += 1
    return out_l[:m], out_p[:m], out_q[:m]
