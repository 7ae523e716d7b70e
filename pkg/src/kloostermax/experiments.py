"""Detector-set searches, moments and tails of M(t_a), equidistribution and block moments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, NumericalIntegrityError
from .families import FamilySpec, SumTable, batch_complete_sums, family_basis, family_roots
from .fejer import harmonic_target, odd_harmonic_bound
from .incomplete import max_scan
from .modular import MoebiusMap, check_prime, moebius_apply, INFINITY
from .selberg import cheb_u_all, st_interval_measure

SQRT2 = math.sqrt(2)
EXHAUSTIVE_LIMIT = 30_000
MIN_SAMPLE = 1_000
MAX_DEGREE = 16
TRACE_SLACK = 1e-6


# ---------------------------------------------------------------- sign patterns


@dataclass(frozen=True)
class SignCondition:
    map: MoebiusMap
    direction: int  # +1: value >= threshold, -1: value <= -threshold
    label: str = ""

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise DomainError("direction must be +1 or -1")


@dataclass(frozen=True)
class SignPattern:
    conditions: tuple = ()
    threshold: float = SQRT2
    harmonics: tuple = ()  # the n of each condition when built from dilations

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        maps = [c.map for c in self.conditions]
        if len(set(maps)) != len(maps):
            raise DomainError("pattern maps must be pairwise distinct")
        if len({m.p for m in maps}) > 1:
            raise DomainError("pattern maps live over different primes")

    @classmethod
    def dilations(cls, ns, p: int, threshold: float = SQRT2) -> "SignPattern":
        """K(n a) >= threshold for n > 0 and <= -threshold for n < 0."""
        conds = []
        for n in ns:
            if n % p == 0:
                raise DomainError("dilation by 0 is not invertible")
            conds.append(SignCondition(MoebiusMap.dilation(n, p), 1 if n > 0 else -1, f"n={n}"))
        return cls(tuple(conds), threshold, tuple(int(n) for n in ns))

    @classmethod
    def odd_harmonics(cls, z: int, p: int) -> "SignPattern":
        """Conditions on n = +-1, +-3, ..., +-z."""
        if z < 1 or z % 2 == 0:
            raise DomainError("z must be an odd positive integer")
        ns = [s * n for n in range(1, z + 1, 2) for s in (1, -1)]
        return cls.dilations(ns, p)

    def condition_measure(self) -> float:
        """mu_ST({theta: 2 cos theta >= threshold}); the <= -threshold side has the same mass."""
        c = self.threshold / 2
        if not -1 <= c <= 1:
            return 0.0 if c > 1 else 1.0
        return st_interval_measure(0.0, math.acos(c))

    def predicted_density(self) -> float:
        return self.condition_measure() ** len(self.conditions)


@dataclass
class SignSearchReport:
    p: int
    family: str
    pattern: SignPattern
    members: list
    count: int
    density: float
    predicted_density: float
    maxima: dict = field(default_factory=dict)
    harmonic_bounds: dict = field(default_factory=dict)
    z: int | None = None
    epsilon: float | None = None
    size_bound: float | None = None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "family": self.family,
            "threshold": self.pattern.threshold,
            "conditions": [
                {"label": c.label, "map": [c.map.alpha, c.map.beta, c.map.gamma, c.map.delta],
                 "direction": c.direction}
                for c in self.pattern.conditions
            ],
            "count": self.count,
            "density": self.density,
            "predicted_density": self.predicted_density,
            "z": self.z,
            "epsilon": self.epsilon,
            "size_bound": self.size_bound,
            "members": [
                {"a": a, "M": self.maxima.get(a), "odd_harmonic_bound": self.harmonic_bounds.get(a)}
                for a in self.members
            ],
        }


def _holds(value: float, direction: int, threshold: float) -> bool:
    return value >= threshold if direction > 0 else value <= -threshold


def epsilon_for(z: int, p: int) -> float:
    """epsilon with (log p)^{1 - epsilon} = z."""
    return 1.0 - math.log(z) / math.log(math.log(p))


def sign_pattern_search(table: SumTable, pattern: SignPattern, with_maxima: bool = True,
                        workers=None) -> SignSearchReport:
    """All a in F_p^x whose transformed table values satisfy every condition.

    Values are read in plus orientation (``table.sums``) at tau . a; a point
    at infinity fails its condition.  Members are re-verified one by one
    with the scalar Moebius action before the report is returned.
    """
    p = table.p
    if not table.family.is_real:
        raise DomainError("sign patterns need a real-valued table")
    vals = np.asarray(table.sums, dtype=np.float64)
    a_all = np.arange(1, p, dtype=np.int64)
    ok = np.ones(p - 1, dtype=bool)
    for cond in pattern.conditions:
        if cond.map.p != p:
            raise DomainError("pattern and table use different primes")
        idx = cond.map.apply_array(a_all)
        finite = idx < p
        v = np.where(finite, vals[np.minimum(idx, p - 1)], 0.0)
        ok &= finite & (cond.direction * v >= pattern.threshold)
    members = [int(a) for a in a_all[ok]]

    for a in members:
        for cond in pattern.conditions:
            b = moebius_apply(cond.map, a)
            if b is INFINITY or not _holds(float(vals[b]), cond.direction, pattern.threshold):
                raise NumericalIntegrityError(f"member a={a} fails condition {cond.label} on readback")

    rep = SignSearchReport(p, table.family.descriptor(), pattern, members, len(members),
                           len(members) / (p - 1), pattern.predicted_density())
    if pattern.harmonics:
        odd = sorted({abs(n) for n in pattern.harmonics})
        if odd == list(range(1, odd[-1] + 1, 2)) and set(pattern.harmonics) == {s * n for n in odd for s in (1, -1)}:
            z = odd[-1]
            rep.z = z
            rep.epsilon = epsilon_for(z, p)
            rep.size_bound = p ** (1 - math.log(4) / math.log(p) ** rep.epsilon)
            for a in members:
                values = {n: float(vals[n * a % p]) for n in pattern.harmonics}
                rep.harmonic_bounds[a] = odd_harmonic_bound(values, z)
    if with_maxima and members:
        _, M, _ = max_scan(table.family, p, members, workers=workers)
        rep.maxima = {a: float(m) for a, m in zip(members, M)}
    return rep


@dataclass
class DetectorReport:
    p: int
    z: int
    search: SignSearchReport
    sup_norm: float
    target: float
    rows: list  # (a, M, odd_harmonic_bound, chain_ok, thresholds_ok)

    @property
    def all_ok(self) -> bool:
        return all(r[3] and r[4] for r in self.rows)


def detector_chain(p: int, z: int, workers=None) -> DetectorReport:
    """Check M(t_a) >= odd_harmonic_bound - 10 (||K||_inf + 1) on the detector set of t_a(x) = e(a x^{-1}/p).

    The master table is Kl(y, 1; p), so the Fourier value of member a at n is Kl(a n, 1; p)
    up to the convention sign, and ||K_a||_inf equals the master sup norm.
    """
    p = check_prime(p)
    fam = FamilySpec.kloosterman_dilate()
    table = batch_complete_sums(fam, p)
    rep = sign_pattern_search(table, SignPattern.odd_harmonics(z, p), workers=workers)
    k = table.sup_norm()
    target = harmonic_target(z)
    rows = []
    for a in rep.members:
        M, b = rep.maxima[a], rep.harmonic_bounds[a]
        rows.append((a, M, b, M >= b - 10 * (k + 1), b >= target - 1e-12))
    return DetectorReport(p, z, rep, k, target, rows)


# ---------------------------------------------------------------- moments and tails


def log_k_curve(k: int) -> float:
    return math.log(k) ** (2 * k)


def loglog_p_curve(p: int, k: int) -> float:
    return math.log(math.log(p)) ** (2 * k)


def P_curve(k: int) -> float:
    """exp(4k loglog k + k logloglog k), NaN where the iterated logs are undefined."""
    if k <= math.e:
        return math.nan
    ll = math.log(math.log(k))
    return math.exp(4 * k * ll + k * math.log(ll))


def maxima_for(F: FamilySpec, p: int, sample: int | None = None, seed: int = 0, workers=None):
    """(a values, M values, sampled flag): exhaustive for p <= 30000, else a seeded sample."""
    p = check_prime(p)
    if p <= EXHAUSTIVE_LIMIT and sample is None:
        a_values = np.arange(1, p, dtype=np.int64)
        sampled = False
    else:
        size = min(p - 1, max(MIN_SAMPLE, sample or 0))
        rng = np.random.default_rng(seed)
        a_values = np.sort(rng.choice(np.arange(1, p, dtype=np.int64), size=size, replace=False))
        sampled = size < p - 1
    a_values, M, _ = max_scan(F, p, a_values, workers=workers)
    return a_values, M, sampled


@dataclass
class MomentReport:
    p: int
    family: str
    k_values: list
    moments: list
    logk_curve: list
    loglogp_curve: list
    Pk_curve: list
    sampled: bool
    sample_size: int
    seed: int | None

    def roots(self) -> list:
        return [m ** (1 / (2 * k)) for k, m in zip(self.k_values, self.moments)]

    def rows(self):
        for i, k in enumerate(self.k_values):
            yield (self.p, self.family, k, self.moments[i], self.logk_curve[i],
                   self.loglogp_curve[i], self.Pk_curve[i])


MOMENT_COLUMNS = ("p", "family", "k", "moment", "logk_curve", "loglogp_curve", "Pk_curve")


def moments_from_maxima(M: np.ndarray, k_list) -> list:
    """(1/n) sum M^{2k}, summed in the given (ascending a) order with compensation."""
    M = np.asarray(M, dtype=np.float64)
    return [math.fsum((M ** (2 * k)).tolist()) / M.size for k in k_list]


def max_moments(F: FamilySpec, p: int, k_list, sample: int | None = None, seed: int = 0,
                workers=None) -> MomentReport:
    k_list = [int(k) for k in k_list]
    if any(k < 1 for k in k_list):
        raise DomainError("moment orders must be positive")
    a_values, M, sampled = maxima_for(F, p, sample, seed, workers)
    moms = moments_from_maxima(M, k_list)
    if not all(m > 0 for m in moms):
        raise NumericalIntegrityError("non-positive moment")
    return MomentReport(p, F.descriptor(), k_list, moms,
                        [log_k_curve(k) for k in k_list],
                        [loglog_p_curve(p, k) for k in k_list],
                        [P_curve(k) for k in k_list],
                        sampled, int(a_values.size), seed if sampled else None)


def tail_distribution(F: FamilySpec, p: int, A_grid, sample: int | None = None, seed: int = 0,
                      workers=None, maxima=None):
    """[(A, fraction of a with M(t_a) > A)] over the grid."""
    if maxima is None:
        _, maxima, _ = maxima_for(F, p, sample, seed, workers)
    M = np.asarray(maxima, dtype=np.float64)
    return [(float(A), float(np.count_nonzero(M > A)) / M.size) for A in A_grid]


# ---------------------------------------------------------------- equidistribution


@dataclass
class EquidistReport:
    p: int
    d_max: int
    single: np.ndarray  # single[i, n] = p^{-1/2} sum_a U_n(K(tau_i a))
    pairs: dict  # (i, j) -> matrix [m, n]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "d_max": self.d_max,
            "single": self.single.tolist(),
            "pairs": {f"{i},{j}": m.tolist() for (i, j), m in self.pairs.items()},
        }


def _transformed_values(vals: np.ndarray, tau: MoebiusMap, p: int) -> np.ndarray:
    idx = tau.apply_array(np.arange(1, p, dtype=np.int64))
    # the trace function is 0 at the point at infinity
    out = np.where(idx < p, vals[np.minimum(idx, p - 1)], 0.0)
    if np.any(np.abs(out) > 2 + TRACE_SLACK):
        raise NumericalIntegrityError("table value outside [-2, 2]")
    return np.clip(out, -2.0, 2.0)


def equidist_matrix(table: SumTable, maps, d_max: int, pairs: bool = True) -> EquidistReport:
    """Normalised Chebyshev sums of the transformed table over a in F_p^x."""
    maps = list(maps)
    if len(set(maps)) != len(maps):
        raise DomainError("maps must be pairwise distinct")
    if not 0 <= d_max <= MAX_DEGREE:
        raise DomainError(f"need 0 <= d_max <= {MAX_DEGREE}")
    p = table.p
    vals = np.asarray(table.sums, dtype=np.float64)
    rp = math.sqrt(p)
    U = [cheb_u_all(d_max, _transformed_values(vals, tau, p)) for tau in maps]
    single = np.array([u.sum(axis=1) for u in U]) / rp
    out = {}
    if pairs:
        for i in range(len(maps)):
            for j in range(i + 1, len(maps)):
                out[(i, j)] = (U[i] @ U[j].T) / rp
    return EquidistReport(p, d_max, single, out)


# ---------------------------------------------------------------- block moments


def block_range(p: int, alpha: float, beta: float) -> tuple[int, int]:
    """Integers x with alpha p < x <= beta p."""
    return int(math.floor(alpha * p)) + 1, int(math.floor(beta * p))


def block_sums(F: FamilySpec, p: int, alpha: float, beta: float, workers=None) -> np.ndarray:
    """p^{-1/2} sum_{alpha p < x <= beta p} t_a(x mod p) for a = 1..p-1."""
    p = check_prime(p)
    if not 0 <= alpha < beta <= 1:
        raise DomainError("need 0 <= alpha < beta <= 1")
    lo, hi = block_range(p, alpha, beta)
    a_values = np.arange(1, p, dtype=np.int64)
    if hi < lo:
        return np.zeros(p - 1, dtype=np.complex128)
    u, v, mask = family_basis(F, p)
    c1, c2 = F.coefficient_arrays(a_values, p)
    with _kernels.worker_threads(workers):
        raw = _kernels.complete_sums(family_roots(p), u, v, mask, c1, c2, p, lo, hi)
    return raw / math.sqrt(p)


def block_moment(F: FamilySpec, p: int, alpha: float, beta: float, k: int, workers=None) -> float:
    """(1/(p-1)) sum_a |p^{-1/2} sum_{alpha p < x <= beta p} t_a(x)|^{2k}."""
    if p > EXHAUSTIVE_LIMIT:
        raise DomainError(f"block moments are exhaustive only, need p <= {EXHAUSTIVE_LIMIT}")
    if k < 1:
        raise DomainError("k must be positive")
    s = block_sums(F, p, alpha, beta, workers)
    return math.fsum((np.abs(s) ** (2 * k)).tolist()) / (p - 1)


def block_bound_shape(p: int, alpha: float, beta: float, k: int, gamma: float = 1.0,
                      delta: float = 1.0) -> float:
    """gamma^{2k} (log k)^{2k} (pi/(beta-alpha))^{-2k/log k} + delta^{2k} p^{-1/2} (log p)^{2k}."""
    first = 0.0
    if k > 1:
        first = gamma ** (2 * k) * math.log(k) ** (2 * k) * (math.pi / (beta - alpha)) ** (-2 * k / math.log(k))
    return first + delta ** (2 * k) * math.log(p) ** (2 * k) / math.sqrt(p)
