"""Fourier expansion of incomplete sums and the Fejer-kernel lower bound for M(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .families import SumTable

TWO_PI = 2 * math.pi


def fejer_kernel(N: int, theta) -> np.ndarray | float:
    """Phi_N(theta) = sum_{|a| <= N} (1 - |a|/N) e(a theta) = (1/N) (sin(pi N theta) / sin(pi theta))^2.

    Period 1 in theta.  Where sin(pi theta) vanishes the limit N is returned.
    """
    if N < 1:
        raise DomainError("Fejer kernel needs N >= 1")
    scalar = np.ndim(theta) == 0
    th = np.asarray(theta, dtype=np.float64)
    frac = th - np.floor(th)
    # distance to the nearest integer, so the removable singularity is detected symmetrically
    d = np.minimum(frac, 1.0 - frac)
    den = np.sin(np.pi * d)
    out = np.full(th.shape, float(N))
    nz = d > 0
    # ratio first: squaring a tiny sine underflows
    out[nz] = (np.sin(np.pi * N * d[nz]) / den[nz]) ** 2 / N
    return float(out) if scalar else out


def fejer_kernel_sum(N: int, theta) -> np.ndarray:
    """Phi_N by direct summation of its N-1 cosine terms (reference path)."""
    th = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    a = np.arange(1, N)
    return 1.0 + 2.0 * ((1.0 - a / N) * np.cos(TWO_PI * np.outer(th, a))).sum(axis=1)


def _signed_terms(K: np.ndarray, alpha: float, nmax: int) -> np.ndarray:
    """K(n)/n (1 - e(-alpha n)) + K(-n)/(-n) (1 - e(alpha n)) for n = 1..nmax."""
    p = K.size
    n = np.arange(1, nmax + 1)
    ph = np.exp(-1j * TWO_PI * alpha * n)
    return (K[n] * (1 - ph) - K[p - n] * (1 - np.conj(ph))) / n


def fourier_partial(table: SumTable, alpha: float, N: int) -> complex:
    """Truncated Fourier expansion of p^{-1/2} sum_{x <= alpha p} t(x).

    Evaluates s * [ (1/(2 pi i)) sum_{1<=|n|<=N} K(n)/n (1 - e(-alpha n)) + alpha K(0) ]
    where s = +1 for a plus-convention table and -1 for the minus convention,
    so the expansion reproduces the prefix sum for either orientation.
    K(-n) is read at index p - n.
    """
    p = table.p
    if not 1 <= N <= (p - 1) // 2:
        raise DomainError("need 1 <= N <= (p-1)/2")
    K = table.values
    body = _signed_terms(K, alpha, N).sum() / (2j * math.pi)
    return table.family.sign * (body + alpha * K[0])


def snapped_prefix(prefix: np.ndarray, alpha: float) -> complex:
    """p^{-1/2} sum_{0 <= x <= floor(alpha p)} t(x) from a table of S(t, H), H = 0..p-1 (plus one step)."""
    p = prefix.size
    H = int(math.floor(alpha * p)) + 1
    if H >= p:
        raise DomainError("alpha too close to 1")
    return complex(prefix[H])


@dataclass(frozen=True)
class EstimatorResult:
    value: float
    best_alpha: float
    best_N: int
    terms_used: int


def default_alpha_grid() -> list[float]:
    return [j / 64 for j in range(1, 64)]


def default_N_list(p: int) -> list[int]:
    top = (p - 1) // 2
    out, n = [], 2
    while n <= top:
        out.append(n)
        n *= 2
    return out or [1]


def estimator_value(table: SumTable, alpha: float, N: int) -> float:
    """|(1/(4 pi)) sum_{1 <= |n| < N} K(n)/n (1 - e(-alpha n))|."""
    if N <= 1:
        return 0.0
    return float(abs(_signed_terms(table.values, alpha, N - 1).sum()) / (4 * math.pi))


def estimator_lower_bound(table: SumTable, N_list=None, alpha_grid=None) -> EstimatorResult:
    """Grid maximum of the Fejer-kernel lower bound for M(t).

    Ties go to the smallest N, then the smallest alpha.
    """
    N_list = sorted(set(default_N_list(table.p) if N_list is None else N_list))
    alpha_grid = sorted(set(default_alpha_grid() if alpha_grid is None else alpha_grid))
    if not N_list or not alpha_grid:
        raise DomainError("empty grid")
    if N_list[0] < 1 or N_list[-1] > table.p // 2 + 1:
        raise DomainError("N outside [1, (p+1)/2]")
    nmax = max(N_list[-1] - 1, 1)
    idx = np.array([N - 1 for N in N_list])
    vals = np.zeros((len(N_list), len(alpha_grid)))
    for j, alpha in enumerate(alpha_grid):
        cs = np.concatenate([[0j], np.cumsum(_signed_terms(table.values, alpha, nmax))])
        vals[:, j] = np.abs(cs[idx]) / (4 * math.pi)
    # row-major argmax = smallest N first, then smallest alpha
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best_N, best_alpha = N_list[i], alpha_grid[j]
    value = estimator_value(table, best_alpha, best_N)
    return EstimatorResult(value, best_alpha, best_N, 2 * (best_N - 1))


def odd_harmonic_bound(values: dict, z: int) -> float:
    """(1/(4 pi)) |sum_{odd 1 <= |n| <= z} 2 v_n / n|, the alpha = 1/2 case of the Fejer bound."""
    if z < 1 or z % 2 == 0:
        raise DomainError("z must be an odd positive integer")
    total = 0.0
    for n in range(1, z + 1, 2):
        for m in (n, -n):
            if m not in values:
                raise DomainError(f"missing value for n={m}")
            total += 2.0 * values[m] / m
    return abs(total) / (4 * math.pi)


def harmonic_target(z: int) -> float:
    """(sqrt 2 / pi) sum_{odd n <= z} 1/n, attained when every v_n sign(n) >= sqrt 2."""
    return math.sqrt(2) / math.pi * sum(1.0 / n for n in range(1, z + 1, 2))
