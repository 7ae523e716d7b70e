"""Exact arithmetic in F_p and on the projective line P^1(F_p).

Residues are plain Python ints (or int64 numpy arrays for the vectorised
helpers).  The point at infinity is the sentinel :data:`INFINITY`; it is
never confused with a residue.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

P_MAX = 2**31

# Bases 2..37 are a deterministic witness set for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def is_odd_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 0 <= n < 2**64."""
    n = int(n)
    if n < 3 or n % 2 == 0:
        return False
    for q in _MR_BASES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    """Validate the working modulus: an odd prime below 2**31."""
    p = int(p)
    if not 3 <= p < P_MAX or not is_odd_prime(p):
        raise DomainError(f"p={p} is not an odd prime in [3, 2^31)")
    return p


def mod_inverse(x: int, p: int) -> int:
    x = int(x) % p
    if x == 0:
        raise DomainError(f"0 has no inverse modulo {p}")
    # extended Euclid
    r0, r1 = p, x
    s0, s1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % p


def pow_mod_array(x: np.ndarray, e: int, p: int) -> np.ndarray:
    """Elementwise x**e mod p for int64 arrays; exact because p < 2**31."""
    x = np.asarray(x, dtype=np.int64) % p
    out = np.ones_like(x)
    base = x.copy()
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out


def inverse_table(p: int) -> np.ndarray:
    """inv[x] = x^{-1} mod p for 1 <= x < p, with inv[0] = 0."""
    return pow_mod_array(np.arange(p, dtype=np.int64), p - 2, p)


def root_of_unity(k: int, p: int) -> complex:
    """e(k/p) = exp(2 pi i k / p), with k reduced mod p first."""
    k = int(k) % p
    return cmath.exp(2j * math.pi * k / p)


def roots_table(p: int) -> np.ndarray:
    """All p-th roots of unity indexed by residue: table[k] = e(k/p)."""
    return np.exp(2j * np.pi * np.arange(p, dtype=np.float64) / p)


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """A projective 2x2 matrix [[alpha, beta], [gamma, delta]] over F_p.

    Equality and hashing are by projective class.
    """

    alpha: int
    beta: int
    gamma: int
    delta: int
    p: int
    _key: tuple = field(init=False, repr=False)

    def __post_init__(self):
        p = self.p
        a, b, c, d = (int(v) % p for v in (self.alpha, self.beta, self.gamma, self.delta))
        if (a * d - b * c) % p == 0:
            raise DomainError("Moebius map has zero determinant mod p")
        for name, v in zip(("alpha", "beta", "gamma", "delta"), (a, b, c, d)):
            object.__setattr__(self, name, v)
        lead = next(v for v in (a, b, c, d) if v)
        s = mod_inverse(lead, p)
        object.__setattr__(self, "_key", (p,) + tuple(v * s % p for v in (a, b, c, d)))

    @classmethod
    def translation(cls, y: int, p: int) -> "MoebiusMap":
        return cls(1, y, 0, 1, p)

    @classmethod
    def dilation(cls, y: int, p: int) -> "MoebiusMap":
        return cls(y, 0, 0, 1, p)

    @classmethod
    def identity(cls, p: int) -> "MoebiusMap":
        return cls(1, 0, 0, 1, p)

    def __eq__(self, other):
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.delta, -self.beta, -self.gamma, self.alpha, self.p)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self after other."""
        a, b, c, d = self.alpha, self.beta, self.gamma, self.delta
        e, f, g, h = other.alpha, other.beta, other.gamma, other.delta
        return MoebiusMap(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.p)

    def apply_array(self, a: np.ndarray) -> np.ndarray:
        """Vectorised action on residues; the point at infinity is encoded as p."""
        p = self.p
        a = np.asarray(a, dtype=np.int64)
        finite = a < p
        num = (self.alpha * a + self.beta) % p
        den = (self.gamma * a + self.delta) % p
        out = np.full(a.shape, p, dtype=np.int64)
        ok = finite & (den != 0)
        out[ok] = num[ok] * pow_mod_array(den[ok], p - 2, p) % p
        if self.gamma:
            out[~finite] = self.alpha * mod_inverse(self.gamma, p) % p
        return out


def moebius_apply(tau: MoebiusMap, a, p: int | None = None):
    """(alpha a + beta) / (gamma a + delta) on P^1(F_p)."""
    p = tau.p if p is None else p
    if p != tau.p:
        raise DomainError("map and modulus disagree")
    if a is INFINITY:
        if tau.gamma == 0:
            return INFINITY
        return tau.alpha * mod_inverse(tau.gamma, p) % p
    a = int(a) % p
    den = (tau.gamma * a + tau.delta) % p
    if den == 0:
        return INFINITY
    return (tau.alpha * a + tau.beta) * mod_inverse(den, p) % p
