"""Compiled inner loops.

Every family member is evaluated as

    t_a(x) = mask[x] * e((c1 * u[x] + c2 * v[x]) / p)

where (u, v, mask) depend only on the family and p, and (c1, c2) only on
the parameter a.  Loops over a run in parallel; each a is processed by one
thread in a fixed order, so results do not depend on the thread count.
"""

from contextlib import contextmanager

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is too old on some systems and only produces a warning
numba.config.THREADING_LAYER = "workqueue"


@njit(cache=True, inline="always")
def _term(roots, u, v, mask, c1, c2, p, x):
    if mask[x] == 0:
        return 0j
    # c1*u and c2*v are each below 2**62 since p < 2**31
    return roots[(c1 * u[x] + c2 * v[x]) % p]


@njit(cache=True, parallel=True)
def complete_sums(roots, u, v, mask, c1, c2, p, lo, hi):
    """Compensated sum of t_a(x mod p) for lo <= x <= hi, one value per (c1, c2)."""
    n = c1.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in prange(n):
        s = 0j
        comp = 0j
        for x in range(lo, hi + 1):
            y = _term(roots, u, v, mask, c1[i], c2[i], p, x % p) - comp
            tt = s + y
            comp = (tt - s) - y
            s = tt
        out[i] = s
    return out


@njit(cache=True, parallel=True)
def prefix_maxima(roots, u, v, mask, c1, c2, p, scale):
    """max_{0<=H<p} |scale * sum_{x<H} t_a(x)| and the first maximising H."""
    n = c1.shape[0]
    best = np.zeros(n, dtype=np.float64)
    arg = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        s = 0j
        comp = 0j
        m = 0.0
        h_best = 0
        for x in range(p - 1):
            y = _term(roots, u, v, mask, c1[i], c2[i], p, x) - comp
            tt = s + y
            comp = (tt - s) - y
            s = tt
            val = abs(s * scale)
            if val > m:
                m = val
                h_best = x + 1
        best[i] = m
        arg[i] = h_best
    return best, arg


@njit(cache=True)
def prefix_sums(roots, u, v, mask, c1, c2, p):
    """P[H] = sum_{x<H} t(x) for H = 0..p (compensated, unnormalised)."""
    out = np.empty(p + 1, dtype=np.complex128)
    s = 0j
    comp = 0j
    out[0] = s
    for x in range(p):
        y = _term(roots, u, v, mask, c1, c2, p, x) - comp
        tt = s + y
        comp = (tt - s) - y
        s = tt
        out[x + 1] = s
    return out


@njit(cache=True)
def compensated_cumsum(t):
    out = np.empty(t.shape[0] + 1, dtype=np.complex128)
    s = 0j
    comp = 0j
    out[0] = s
    for i in range(t.shape[0]):
        y = t[i] - comp
        tt = s + y
        comp = (tt - s) - y
        s = tt
        out[i + 1] = s
    return out


@contextmanager
def worker_threads(workers):
    """Temporarily cap numba's thread pool; None leaves it unchanged."""
    if workers is None:
        yield
        return
    old = numba.get_num_threads()
    numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))
    try:
        yield
    finally:
        numba.set_num_threads(old)
