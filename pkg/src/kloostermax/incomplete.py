"""Incomplete sums S(t, H) = p^{-1/2} sum_{0 <= n < H} t(n) and their maximum M(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .families import (
    FamilySpec,
    SumTable,
    family_basis,
    family_roots,
    member_values,
)
from .modular import check_prime

FULL_PREFIX_LIMIT = 200_000
SHORT_SUM_EPSILONS = (0.05, 0.1)


@dataclass(frozen=True)
class PrefixProfile:
    p: int
    family: FamilySpec
    a: int
    M: float
    argmax_H: int
    full_prefix: np.ndarray | None = None

    def S(self, H: int) -> complex:
        if self.full_prefix is None:
            raise DomainError("profile was built without the full prefix")
        return complex(self.full_prefix[H])


def _prefix(family, a, p):
    u, v, mask = family_basis(family, p)
    c1, c2 = family.coefficients_for(a, p)
    return _kernels.prefix_sums(family_roots(p), u, v, mask, c1, c2, p)


def prefix_profile(family: FamilySpec, a: int, p: int, keep_prefix: bool | None = None) -> PrefixProfile:
    """M(t_a) = max_{0 <= H < p} |S(t_a, H)| in one compensated pass.

    ``argmax_H`` is the smallest maximiser.  The prefix array
    S(t_a, 0..p-1) is kept when p <= 200000 unless ``keep_prefix`` says otherwise.
    """
    p = check_prime(p)
    family.validate(p)
    a = int(a) % p
    P = _prefix(family, a, p)
    S = P[:p] * (1.0 / math.sqrt(p))
    mags = np.abs(S)
    h = int(np.argmax(mags))
    keep = p <= FULL_PREFIX_LIMIT if keep_prefix is None else keep_prefix
    return PrefixProfile(p, family, a, float(mags[h]), h, S if keep else None)


def prefix_from_values(t: np.ndarray) -> np.ndarray:
    """S(t, H) for H = 0..p-1 for an arbitrary function given by its values."""
    t = np.asarray(t, dtype=np.complex128)
    p = t.size
    return _kernels.compensated_cumsum(t)[:p] * (1.0 / math.sqrt(p))


def max_of_values(t: np.ndarray) -> tuple[float, int]:
    S = np.abs(prefix_from_values(t))
    h = int(np.argmax(S))
    return float(S[h]), h


def max_scan(family: FamilySpec, p: int, a_values=None, workers=None):
    """M(t_a) and argmax H for many a (default: all of F_p^x)."""
    p = check_prime(p)
    family.validate(p)
    if a_values is None:
        a_values = np.arange(1, p, dtype=np.int64)
    a_values = np.asarray(a_values, dtype=np.int64)
    u, v, mask = family_basis(family, p)
    c1, c2 = family.coefficient_arrays(a_values, p)
    with _kernels.worker_threads(workers):
        M, H = _kernels.prefix_maxima(family_roots(p), u, v, mask, c1, c2, p, 1.0 / math.sqrt(p))
    return a_values, M, H


def range_sum(family: FamilySpec, a: int, p: int, N: int, H: int) -> complex:
    """Unnormalised sum of t_a(x) over N <= x <= N + H."""
    p = check_prime(p)
    if N < 1 or H < 0 or N + H >= p:
        raise DomainError(f"range [{N}, {N + H}] not inside [1, p-1]")
    u, v, mask = family_basis(family, p)
    c1, c2 = family.coefficient_arrays([a], p)
    return complex(_kernels.complete_sums(family_roots(p), u, v, mask, c1, c2, p, N, N + H)[0])


def pv_ratio(profile: PrefixProfile, table: SumTable) -> float:
    """M / (||K||_inf log 3p); at most 1 by the Polya-Vinogradov inequality."""
    if (profile.p, profile.family.kind, profile.family.param, profile.family.coefficients) != (
        table.p, table.family.kind, table.family.param, table.family.coefficients
    ) or profile.a != table.member:
        raise DomainError("profile and table describe different functions")
    k = table.sup_norm()
    if k == 0:
        return 0.0
    return profile.M / (k * math.log(3 * profile.p))


def pv_ratio_values(t: np.ndarray, K: np.ndarray) -> float:
    p = len(t)
    k = float(np.max(np.abs(K)))
    if k == 0:
        return 0.0
    return max_of_values(t)[0] / (k * math.log(3 * p))


@dataclass(frozen=True)
class ShortSumResult:
    p: int
    a: int
    H: int
    value: float
    argmax_N: int
    reference: dict
    envelope: float


def short_sum_extremum(family: FamilySpec, a: int, p: int, H: int) -> ShortSumResult:
    """max_{1 <= N <= p-H-1} |sum_{N <= x <= N+H} t_a(x)| by a sliding window over prefix sums.

    Reported next to H^{1-eps} for eps in (0.05, 0.1) and the 2 sqrt(H) log p envelope.
    """
    p = check_prime(p)
    if not 1 <= H < p - 1:
        raise DomainError("need 1 <= H < p - 1")
    P = _prefix(family, int(a) % p, p)
    N = np.arange(1, p - H, dtype=np.int64)
    window = np.abs(P[N + H + 1] - P[N])
    i = int(np.argmax(window))
    ref = {eps: float(H ** (1 - eps)) for eps in SHORT_SUM_EPSILONS}
    return ShortSumResult(p, int(a) % p, H, float(window[i]), int(N[i]), ref,
                          2 * math.sqrt(H) * math.log(p))


def conjecture_window_lengths(p: int) -> tuple[int, int, int]:
    return (math.ceil(p ** 0.45), math.ceil(math.sqrt(p)), math.ceil(p ** 0.55))

