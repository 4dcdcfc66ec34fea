"""Benchmark the compiled kernels against the numpy fallback.

Run:  python3 benchmarks/bench_kernels.py

Times the exact-table construction kernels on representative sizes and
reports both backends side by side.  The kernels dominate the runtime of
minimal-sample-size searches, which rebuild the table at every probed n.
"""

import math
import time

import numpy as np

from bhtlab._kernels import _pykernels

try:
    from bhtlab._kernels import _ckernels
except ImportError:
    _ckernels = None


def _time(fn, *args, repeats=3):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_typeclass():
    rng = np.random.default_rng(0)
    cases = [(2, 200_000), (3, 1_500), (4, 200), (6, 50)]
    print(f"{'kernel':<22}{'k':>3}{'n':>9}{'atoms':>10}{'numpy':>12}{'cython':>12}{'speedup':>9}")
    for k, n in cases:
        probs = rng.dirichlet(np.ones(k))
        logp = np.log(probs)
        logq = np.log(rng.dirichlet(np.ones(k)))
        t_py, ref = _time(_pykernels.typeclass_atoms, logp, logq, n)
        if _ckernels is not None:
            t_cy, out = _time(_ckernels.typeclass_atoms, logp, logq, n)
            assert np.allclose(np.sort(out[0]), np.sort(ref[0]), atol=1e-12)
            speed = f"{t_py / t_cy:8.1f}x"
            cy = f"{t_cy * 1e3:10.2f}ms"
        else:
            speed, cy = "      n/a", "       n/a"
        atoms = math.comb(n + k - 1, k - 1)
        print(f"{'typeclass_atoms':<22}{k:>3}{n:>9}{atoms:>10}{t_py * 1e3:10.2f}ms{cy}{speed}")


def bench_convolve_merge():
    rng = np.random.default_rng(1)
    sizes = [(1_000, 16), (50_000, 8), (500_000, 4)]
    print(f"{'kernel':<22}{'m1':>9}{'m2':>4}{'numpy':>14}{'cython':>12}{'speedup':>9}")
    for m1, m2 in sizes:
        l1 = np.sort(rng.normal(size=m1))
        p1 = rng.dirichlet(np.ones(m1))
        q1 = rng.dirichlet(np.ones(m1))
        l2 = np.sort(rng.normal(size=m2))
        p2 = rng.dirichlet(np.ones(m2))
        q2 = rng.dirichlet(np.ones(m2))

        def run(mod):
            return mod.bucket_merge(*mod.convolve_atoms(l1, p1, q1, l2, p2, q2), 1e-9)

        t_py, ref = _time(run, _pykernels)
        if _ckernels is not None:
            t_cy, out = _time(run, _ckernels)
            assert abs(out[1].sum() - ref[1].sum()) < 1e-12
            speed = f"{t_py / t_cy:8.1f}x"
            cy = f"{t_cy * 1e3:10.2f}ms"
        else:
            speed, cy = "      n/a", "       n/a"
        print(f"{'convolve+merge':<22}{m1:>9}{m2:>4}{t_py * 1e3:12.2f}ms{cy}{speed}")


if __name__ == "__main__":
    if _ckernels is None:
        print("compiled backend unavailable; timing the numpy fallback only\n")
    bench_typeclass()
    print()
    bench_convolve_merge()
