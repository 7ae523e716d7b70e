"""One-parameter families of trace functions and their complete sums.

A family member is t_a(x) = e(f_a(x)/p) (zero at poles).  Its normalised
Fourier transform is

    K_a(y) = s * p^{-1/2} * sum_{0 <= x < p} t_a(x) e(yx/p),

with s = -1 ("minus", the Polya-Vinogradov convention, default) or s = +1.

Families
--------
kloosterman_shift(b)   f_a(x) = a x + b/x        K_a(y) = s Kl(a + y, b)
kloosterman_dilate     f_a(x) = a/x              K_a(y) = s Kl(a y, 1)
kloosterman_curve(m)   f_a(x) = a x + m/(a x)    K_a(y) = s Kl(m + m y/a, 1)
birch_shift            f_a(x) = a x + x^3        K_a(y) = s (Bi(a + y, 1) + p^{-1/2})
birch_dilate           f_a(x) = x + a x^3
birch_curve(m)         f_a(x) = a x + m (a x)^3
laurent(coeffs)        f_a(x) = a x + sum c_j x^{e_j}

Complete sums Kl/Bi run over 1 <= x < p; Fourier tables run over all of F_p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .chirp import chirp_dft, direct_dft
from .errors import DomainError, NumericalIntegrityError
from .modular import (
    MoebiusMap,
    check_prime,
    inverse_table,
    mod_inverse,
    pow_mod_array,
    roots_table,
)

KINDS = (
    "kloosterman_shift",
    "kloosterman_dilate",
    "kloosterman_curve",
    "birch_shift",
    "birch_dilate",
    "birch_curve",
    "laurent",
)

# numeric ids used by the binary table cache
KIND_IDS = {k: i + 1 for i, k in enumerate(KINDS)}

REAL_TOL = 1e-9
WEIL_SLACK = 1e-9
TABLE_SLACK = 1e-6
TABLE_ACCURACY = 1e-5


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    param: int = 1
    coefficients: tuple = ()
    sign_convention: str = "minus"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown family kind {self.kind!r}")
        if self.sign_convention not in ("plus", "minus"):
            raise DomainError("sign_convention must be 'plus' or 'minus'")
        if self.kind == "laurent":
            coeffs = tuple((int(e), int(c)) for e, c in self.coefficients)
            if not any(e != 0 for e, _ in coeffs):
                raise DomainError("laurent family needs at least one nonzero exponent")
            object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "param", int(self.param))

    # constructors -------------------------------------------------------
    @classmethod
    def kloosterman_shift(cls, b=1, sign="minus"):
        return cls("kloosterman_shift", b, sign_convention=sign)

    @classmethod
    def kloosterman_dilate(cls, sign="minus"):
        return cls("kloosterman_dilate", sign_convention=sign)

    @classmethod
    def kloosterman_curve(cls, m, sign="minus"):
        return cls("kloosterman_curve", m, sign_convention=sign)

    @classmethod
    def birch_shift(cls, sign="minus"):
        return cls("birch_shift", sign_convention=sign)

    @classmethod
    def birch_dilate(cls, sign="minus"):
        return cls("birch_dilate", sign_convention=sign)

    @classmethod
    def birch_curve(cls, m, sign="minus"):
        return cls("birch_curve", m, sign_convention=sign)

    @classmethod
    def laurent(cls, coefficients, sign="minus"):
        return cls("laurent", 0, tuple(coefficients), sign_convention=sign)

    # properties ---------------------------------------------------------
    @property
    def sign(self) -> int:
        return -1 if self.sign_convention == "minus" else 1

    @property
    def has_pole(self) -> bool:
        if self.kind.startswith("kloosterman"):
            return True
        if self.kind == "laurent":
            return any(e < 0 for e, _ in self.coefficients)
        return False

    @property
    def is_real(self) -> bool:
        """Complete sums are real: f_a is odd, so x -> -x conjugates terms."""
        if self.kind != "laurent":
            return True
        return all(e % 2 != 0 for e, c in self.coefficients if c)

    @property
    def default_member(self) -> int:
        """Member whose Fourier table is the master function of the family."""
        return 0 if self.kind in ("kloosterman_shift", "birch_shift") else 1

    def descriptor(self) -> str:
        if self.kind in ("kloosterman_shift", "kloosterman_curve", "birch_curve"):
            tag = "b" if self.kind == "kloosterman_shift" else "m"
            core = f"{self.kind}[{tag}={self.param}]"
        elif self.kind == "laurent":
            core = "laurent[" + ",".join(f"{c}x^{e}" for e, c in self.coefficients) + "]"
        else:
            core = self.kind
        return f"{core}/{self.sign_convention}"

    def validate(self, p: int):
        if self.kind in ("kloosterman_curve", "birch_curve") and self.param % p == 0:
            raise DomainError("curve families need m != 0 mod p")
        if self.kind == "kloosterman_shift" and self.param % p == 0:
            raise DomainError("kloosterman_shift needs b != 0 mod p")

    def weil_bound(self, p: int) -> float:
        """Bound for |complete sum over 1 <= x < p| / sqrt(p) from the Riemann hypothesis for curves."""
        if self.kind.startswith("kloosterman"):
            return 2.0
        if self.kind.startswith("birch"):
            # the bound 2 holds for the sum over all of F_p; dropping x = 0 adds at most p^{-1/2}
            return 2.0 + 1.0 / math.sqrt(p)
        pos = max([1] + [e for e, c in self.coefficients if e > 0 and c % p])
        neg = max([0] + [-e for e, c in self.coefficients if e < 0 and c % p])
        if neg:
            return float(pos + neg)
        return max(pos - 1, 1) + 1.0 / math.sqrt(p)

    # evaluation ---------------------------------------------------------
    def coefficients_for(self, a: int, p: int) -> tuple[int, int]:
        """(c1, c2) such that f_a(x) = c1 u(x) + c2 v(x)."""
        a = int(a) % p
        k = self.kind
        if k == "kloosterman_shift":
            return a, self.param % p
        if k == "kloosterman_dilate":
            return 0, a
        if k == "kloosterman_curve":
            if a == 0:
                raise DomainError("kloosterman_curve needs a != 0")
            return a, self.param * mod_inverse(a, p) % p
        if k == "birch_shift":
            return a, 1
        if k == "birch_dilate":
            return 1, a
        if k == "birch_curve":
            return a, self.param * pow(a, 3, p) % p
        return a, 1

    def coefficient_arrays(self, a_values, p: int):
        a = np.asarray(a_values, dtype=np.int64) % p
        k = self.kind
        if k == "kloosterman_shift":
            return a, np.full_like(a, self.param % p)
        if k == "kloosterman_dilate":
            return np.zeros_like(a), a
        if k == "kloosterman_curve":
            if np.any(a == 0):
                raise DomainError("kloosterman_curve needs a != 0")
            return a, (self.param % p) * pow_mod_array(a, p - 2, p) % p
        if k == "birch_shift":
            return a, np.ones_like(a)
        if k == "birch_dilate":
            return np.ones_like(a), a
        if k == "birch_curve":
            return a, (self.param % p) * pow_mod_array(a, 3, p) % p
        return a, np.ones_like(a)


@lru_cache(maxsize=16)
def _basis_cached(family: FamilySpec, p: int):
    x = np.arange(p, dtype=np.int64)
    mask = np.ones(p, dtype=np.uint8)
    k = family.kind
    if k.startswith("kloosterman"):
        u = x
        v = inverse_table(p)
        mask[0] = 0
    elif k.startswith("birch"):
        u = x
        v = pow_mod_array(x, 3, p)
    else:
        u = x
        v = np.zeros(p, dtype=np.int64)
        inv = inverse_table(p) if family.has_pole else None
        for e, c in family.coefficients:
            c %= p
            if e >= 0:
                term = pow_mod_array(x, e, p)
            else:
                term = pow_mod_array(inv, -e, p)
            v = (v + c * term) % p
        if family.has_pole:
            mask[0] = 0
    for arr in (u, v, mask):
        arr.setflags(write=False)
    return u, v, mask


def family_basis(family: FamilySpec, p: int):
    """(u, v, mask) arrays describing the x-dependence of the family over F_p."""
    return _basis_cached(family, p)


@lru_cache(maxsize=16)
def _roots_cached(p: int):
    r = roots_table(p)
    r.setflags(write=False)
    return r


def family_roots(p: int) -> np.ndarray:
    return _roots_cached(p)


def phase_value(family: FamilySpec, a: int, x: int, p: int) -> complex:
    """t_a(x) = e(f_a(x)/p), or 0 where f_a has a pole."""
    if not 0 <= x < p:
        raise DomainError("x must satisfy 0 <= x < p")
    u, v, mask = family_basis(family, p)
    if not mask[x]:
        return 0j
    c1, c2 = family.coefficients_for(a, p)
    k = (c1 * int(u[x]) + c2 * int(v[x])) % p
    return complex(family_roots(p)[k])


def member_values(family: FamilySpec, a: int, p: int) -> np.ndarray:
    """The whole vector (t_a(0), ..., t_a(p-1))."""
    u, v, mask = family_basis(family, p)
    c1, c2 = family.coefficients_for(a, p)
    idx = (c1 * u % p + c2 * v % p) % p
    return family_roots(p)[idx] * mask


def complete_sums(family: FamilySpec, a_values, p: int, workers=None) -> np.ndarray:
    """p^{-1/2} sum_{1 <= x < p} t_a(x) for many a at once (complex, unchecked)."""
    p = check_prime(p)
    family.validate(p)
    u, v, mask = family_basis(family, p)
    c1, c2 = family.coefficient_arrays(a_values, p)
    with _kernels.worker_threads(workers):
        raw = _kernels.complete_sums(family_roots(p), u, v, mask, c1, c2, p, 1, p - 1)
    return raw / math.sqrt(p)


def complete_sum(family: FamilySpec, a: int, p: int):
    """Normalised complete sum over 1 <= x < p, e.g. Kl(a, b; p) or Bi(a, 1; p).

    Returns a float for real families after checking the imaginary part,
    a complex number otherwise.  A value beyond the Weil bound raises
    NumericalIntegrityError.
    """
    val = complex(complete_sums(family, [a], p)[0])
    if abs(val) > family.weil_bound(p) + WEIL_SLACK:
        raise NumericalIntegrityError(
            f"|sum| = {abs(val):.12g} exceeds Weil bound {family.weil_bound(p):.12g} (a={a}, p={p})"
        )
    if family.is_real:
        if abs(val.imag) > REAL_TOL:
            raise NumericalIntegrityError(f"imaginary part {val.imag:.3g} of a real sum")
        return val.real
    return val


def kloosterman(a: int, b: int, p: int) -> float:
    """Kl(a, b; p)."""
    return complete_sum(FamilySpec.kloosterman_shift(b), a, p)


def birch(a: int, b: int, p: int) -> float:
    """Bi(a, b; p) = p^{-1/2} sum_{1 <= x < p} e((a x + b x^3)/p)."""
    if b % p == 0:
        raise DomainError("Bi(a, b; p) needs b != 0")
    # x -> b^{-1/3} x is not always available, so sum directly
    fam = FamilySpec.laurent(((3, b),), sign="plus")
    p = check_prime(p)
    val = complex(complete_sums(fam, [a], p)[0])
    if abs(val.imag) > REAL_TOL:
        raise NumericalIntegrityError(f"imaginary part {val.imag:.3g} of a real sum")
    return val.real


@dataclass(frozen=True)
class SumTable:
    """All normalised Fourier values K_a(y), y in F_p, of one family member."""

    p: int
    family: FamilySpec
    member: int
    values: np.ndarray
    method: str
    max_abs_error_estimate: float = 0.0
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.values.shape != (self.p,):
            raise NumericalIntegrityError("table length differs from p")
        self.values.setflags(write=False)

    @property
    def sums(self) -> np.ndarray:
        """Values with the convention sign removed (plus orientation), real part only for real families."""
        v = self.family.sign * self.values
        return v.real if self.family.is_real else v

    def sup_norm(self) -> float:
        """||K||_inf over all y including y = 0."""
        return float(np.max(np.abs(self.values))) if self.p else 0.0

    def __len__(self):
        return self.p


def _fourier_weil_bound(family: FamilySpec, p: int) -> float:
    if family.kind.startswith("kloosterman"):
        return 2.0
    if family.kind.startswith("birch"):
        return 2.0
    return family.weil_bound(p) + 1.0 / math.sqrt(p)


def check_table(table: SumTable, sample=None, rng_seed=0) -> None:
    """Re-check realness and the Weil bound on the table (or a random sample of entries)."""
    vals = table.values
    if sample is not None and sample < table.p:
        rng = np.random.default_rng(rng_seed)
        vals = vals[rng.choice(table.p, size=sample, replace=False)]
    if not np.all(np.isfinite(vals)):
        raise NumericalIntegrityError("non-finite table entries")
    bound = _fourier_weil_bound(table.family, table.p)
    worst = float(np.max(np.abs(vals))) if vals.size else 0.0
    if worst > bound + TABLE_SLACK:
        raise NumericalIntegrityError(f"table entry {worst:.12g} exceeds bound {bound:.12g}")
    if table.family.is_real and vals.size and float(np.max(np.abs(vals.imag))) > 1e-8:
        raise NumericalIntegrityError("real family table has non-negligible imaginary parts")


def batch_complete_sums(family: FamilySpec, p: int, a: int | None = None, method: str = "chirp_dft",
                        probes: int = 8) -> SumTable:
    """Fourier table {K_a(y)}_{y mod p} of one member in a single length-p transform.

    ``a`` defaults to ``family.default_member``, whose table is the master
    function (Kl(y, b) for kloosterman_shift, Kl(y, 1) for kloosterman_dilate).
    The chirp path is audited against direct summation on ``probes``
    deterministic arguments; a deviation above 1e-5 aborts.
    """
    p = check_prime(p)
    family.validate(p)
    a = family.default_member if a is None else int(a) % p
    t = member_values(family, a, p)
    scale = family.sign / math.sqrt(p)
    if method == "direct":
        vals = direct_dft(t) * scale
        err = 0.0
    elif method == "chirp_dft":
        vals = chirp_dft(t) * scale
        rng = np.random.default_rng(p)
        ys = np.unique(np.concatenate([[0, 1, p - 1], rng.integers(0, p, size=probes)]))
        ref = direct_dft(t, ys) * scale
        err = float(np.max(np.abs(ref - vals[ys])))
        if err > TABLE_ACCURACY:
            raise NumericalIntegrityError(f"chirp DFT accuracy estimate {err:.3g} exceeds {TABLE_ACCURACY}")
    else:
        raise DomainError(f"unknown method {method!r}")
    if family.is_real:
        vals = vals.real + 0j
    table = SumTable(p, family, a, vals, method, err)
    check_table(table)
    return table


def master_table(family: FamilySpec, p: int) -> SumTable:
    """Table of the single function g with K_a(y) = g(tau_y . a) for every member a.

    For the shift and dilate kinds g is the Fourier table of the default
    member; for kloosterman_curve it is Kl(., 1; p) with the family's sign.
    """
    if family.kind == "kloosterman_curve":
        return batch_complete_sums(FamilySpec.kloosterman_dilate(family.sign_convention), p)
    if family.kind in ("kloosterman_shift", "kloosterman_dilate", "birch_shift"):
        return batch_complete_sums(family, p)
    raise DomainError(f"{family.kind} has no Moebius master function")


def fourier_map(family: FamilySpec, y: int, p: int) -> MoebiusMap | None:
    """tau_y with K_a(y) = g(tau_y . a), g the master function (see master_table).

    Returns None where the family has no such map (birch_dilate, birch_curve,
    laurent) or where it degenerates (kloosterman_curve at y = 0, whose
    Fourier value Kl(m, 1; p) does not depend on a).
    """
    y %= p
    k = family.kind
    if k in ("kloosterman_shift", "birch_shift"):
        return MoebiusMap.translation(y, p)
    if k == "kloosterman_dilate":
        return MoebiusMap.dilation(y, p) if y else None
    if k == "kloosterman_curve":
        m = family.param % p
        return MoebiusMap(m, m * y, 1, 0, p) if y else None
    return None


@dataclass(frozen=True)
class AngleTable:
    p: int
    family: FamilySpec
    angles: np.ndarray


def angle_of(v: float) -> float:
    """theta in [0, pi] with 2 cos(theta) = v."""
    v = float(v)
    if abs(v) > 2 + TABLE_SLACK:
        raise DomainError(f"|{v}| exceeds 2, no Sato-Tate angle")
    return math.acos(min(1.0, max(-1.0, v / 2)))


def angle_table(table: SumTable) -> AngleTable:
    if not table.family.is_real:
        raise DomainError("angles need a real-valued table")
    v = table.values.real
    if np.any(np.abs(v) > 2 + TABLE_SLACK):
        raise DomainError("table exceeds 2, no Sato-Tate angles")
    return AngleTable(table.p, table.family, np.arccos(np.clip(v / 2, -1.0, 1.0)))
