"""Chebyshev-U calculus for the Sato-Tate measure and Selberg-type minorants.

Angles theta live in [0, pi] with d mu_ST = (2/pi) sin^2(theta) d theta, and
U_n(2 cos theta) = sin((n+1) theta) / sin(theta) is an orthonormal basis of
L^2(mu_ST).  A function of theta has a finite U-expansion exactly when it is
a cosine polynomial in theta, so all minorants here are built as even
trigonometric polynomials of y = theta / (2 pi), i.e. the indicator of
[u, v] (in x = theta / pi) is reflected across theta = 0 and theta = pi
before smoothing.  In the x variable the construction is the function
x -> A(x / 2) with A even and 1-periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalIntegrityError
from .fejer import fejer_kernel

ST_TOL = 1e-9
L0 = 47
GRID_POINTS = 10_000
ENDPOINT_GAP = 1e-3
GRID_TOL = 1e-12


# ---------------------------------------------------------------- Chebyshev U


def cheb_u(n: int, x):
    """U_n(x) for |x| <= 2 by U_0 = 1, U_1 = x, U_{k+1} = x U_k - U_{k-1}."""
    if n < 0 or n > 10**6:
        raise DomainError("need 0 <= n <= 10^6")
    xa = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(xa) > 2):
        raise DomainError("Chebyshev argument must lie in [-2, 2]")
    prev, cur = np.ones_like(xa), xa.copy()
    if n == 0:
        out = prev
    else:
        for _ in range(n - 1):
            prev, cur = cur, xa * cur - prev
        out = cur
    return float(out) if np.ndim(x) == 0 else out


def cheb_u_all(nmax: int, x) -> np.ndarray:
    """Rows U_0(x), ..., U_nmax(x), same recurrence as cheb_u."""
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(np.abs(xa) > 2):
        raise DomainError("Chebyshev argument must lie in [-2, 2]")
    out = np.empty((nmax + 1, xa.size))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = xa
    for k in range(1, nmax):
        out[k + 1] = xa * out[k] - out[k - 1]
    return out


def st_density(theta):
    return (2 / np.pi) * np.sin(theta) ** 2


def st_integrate(f, tol: float = ST_TOL, points=None, limit: int = 400) -> float:
    """Adaptive quadrature of int_0^pi f d mu_ST to absolute tolerance ``tol``."""
    val, err = integrate.quad(lambda th: f(th) * (2 / math.pi) * math.sin(th) ** 2,
                              0.0, math.pi, epsabs=tol, epsrel=0.0, limit=limit, points=points)
    if not err <= tol:
        raise NumericalIntegrityError(f"Sato-Tate quadrature did not reach {tol:g} (estimate {err:.2g})")
    return val


def st_interval_measure(t0: float, t1: float) -> float:
    """Closed form mu_ST([t0, t1]) = [theta - sin(2 theta)/2] / pi."""
    g = lambda t: (t - math.sin(2 * t) / 2) / math.pi
    return g(t1) - g(t0)


def st_project(f, nmax: int, degree: int) -> np.ndarray:
    """int f(theta) U_n(2 cos theta) d mu_ST for n = 0..nmax.

    ``f`` must be an even trigonometric polynomial in theta of degree at most
    ``degree``; the periodic trapezoidal rule is then exact.
    """
    K = 2 * (degree + nmax + 4)
    th = 2 * np.pi * np.arange(K) / K
    fv = np.asarray(f(th), dtype=np.float64)
    n = np.arange(nmax + 1)
    # U_n(2cos) sin^2 = sin((n+1) theta) sin(theta), no division by zero
    w = np.sin(np.outer(n + 1, th)) * np.sin(th)
    # half of the full-period mean times the (2/pi) density and length 2 pi
    return (w @ fv) * (2 / np.pi) * (np.pi / K)


@dataclass(frozen=True)
class ChebCoeffs:
    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.abs(self.coefficients) > 1e-12)[0]
        return int(nz[-1]) if nz.size else 0

    def __call__(self, theta):
        th = np.asarray(theta, dtype=np.float64)
        U = cheb_u_all(len(self.coefficients) - 1, np.clip(2 * np.cos(th), -2, 2))
        return self.coefficients @ U


def cosine_to_cheb(a: np.ndarray) -> np.ndarray:
    """Exact U-coefficients of sum_k a_k cos(k theta): cos k = (U_k - U_{k-2}) / 2."""
    a = np.asarray(a, dtype=np.float64)
    out = np.zeros(len(a))
    out[0] += a[0]
    if len(a) > 1:
        out[1] += a[1] / 2
    for k in range(2, len(a)):
        out[k] += a[k] / 2
        out[k - 2] -= a[k] / 2
    return out


# ---------------------------------------------------------------- minorants


def vaaler_weights(L: int) -> np.ndarray:
    """phi(k/(L+1)) for k = 1..L with phi(t) = pi t (1-t) cot(pi t) + t."""
    t = np.arange(1, L + 1) / (L + 1)
    return np.pi * t * (1 - t) / np.tan(np.pi * t) + t


def _cos_eval(coeffs: np.ndarray, theta) -> np.ndarray:
    th = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    k = np.arange(len(coeffs))
    return np.cos(np.outer(th, k)) @ coeffs


def _reflected_intervals(u: float, v: float):
    """Pieces (center, half_length) in y = x/2 of the even, 1-periodic extension of [u, v]."""
    if u == 0 and v == 1:
        return [(0.0, 0.5)]
    if u == 0:
        return [(0.0, v / 2)]
    if v == 1:
        return [(0.5, (1 - u) / 2)]
    c, h = (u + v) / 4, (v - u) / 4
    return [(c, h), (-c, h)]


def _endpoints(u: float, v: float):
    """Endpoints e > 0 of the reflected set in y; each contributes Fejer bumps at +-e."""
    out = []
    if 0 < u:
        out.append(u / 2)
    if v < 1:
        out.append(v / 2)
    return out


@dataclass(frozen=True)
class SelbergPair:
    """Minorant alpha and correction beta of the indicator of [u, v] in x = theta/pi.

    ``alpha`` and ``beta`` hold coefficients a_k of sum_{k<=L} a_k cos(k theta)
    (equivalently cos(pi k x)).  On [0, 1]:  0 <= alpha <= 1 and
    |chi_[u,v] - alpha| <= beta.
    """

    u: float
    v: float
    L: int
    alpha: np.ndarray
    beta: np.ndarray
    alpha_cheb: ChebCoeffs
    beta_cheb: ChebCoeffs

    def alpha_at(self, x):
        return _cos_eval(self.alpha, np.pi * np.asarray(x, dtype=np.float64))

    def beta_at(self, x):
        return _cos_eval(self.beta, np.pi * np.asarray(x, dtype=np.float64))

    def beta_l2_squared(self) -> float:
        """int_0^1 beta(x)^2 dx by Parseval."""
        b = self.beta
        return float(b[0] ** 2 + 0.5 * np.sum(b[1:] ** 2))

    @property
    def alpha_integral(self) -> float:
        return float(self.alpha_cheb.coefficients[0])

    @property
    def beta_integral(self) -> float:
        return float(self.beta_cheb.coefficients[0])


def indicator(u: float, v: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return ((x >= u) & (x <= v)).astype(np.float64)


def verification_grid(u: float, v: float, points: int = GRID_POINTS) -> np.ndarray:
    x = np.linspace(0.0, 1.0, points)
    keep = np.ones(points, dtype=bool)
    for e in (u, v):
        keep &= np.abs(x - e) >= ENDPOINT_GAP
    return x[keep]


def check_pair(pair: SelbergPair) -> dict:
    """Evaluate the minorant contract on the verification grid; returns the worst margins."""
    xall = np.linspace(0.0, 1.0, GRID_POINTS)
    a_all = pair.alpha_at(xall)
    x = verification_grid(pair.u, pair.v)
    a = pair.alpha_at(x)
    b = pair.beta_at(x)
    chi = indicator(pair.u, pair.v, x)
    tail_a = np.max(np.abs(pair.alpha_cheb.coefficients[2 * pair.L + 1:]), initial=0.0)
    tail_b = np.max(np.abs(pair.beta_cheb.coefficients[2 * pair.L + 1:]), initial=0.0)
    return {
        "alpha_min": float(a_all.min()),
        "alpha_max": float(a_all.max()),
        "sandwich_excess": float(np.max(np.abs(chi - a) - b)),
        "cheb_max": float(max(np.max(np.abs(pair.alpha_cheb.coefficients)),
                              np.max(np.abs(pair.beta_cheb.coefficients)))),
        "cheb_tail": float(max(tail_a, tail_b)),
        "beta_l2_squared": pair.beta_l2_squared(),
        "beta_l2_bound": (8 + 3 * pair.L) / (2 * pair.L + 2) ** 2,
    }


def selberg_pair(u: float, v: float, L: int) -> SelbergPair:
    """Selberg-type minorant of the indicator of [u, v] (x = theta/pi) with Fejer correction.

    Built from Vaaler's approximation of the sawtooth: the indicator's cosine
    coefficients are damped by phi(k/(L+1)), and beta is the average of
    degree-L Fejer kernels (scaled by 1/(2(L+1))) centred at the endpoints.
    Construction aborts if the grid audit finds a violated invariant.  The
    bound 0 <= alpha <= 1 is guaranteed when the reflected interval length is
    a multiple of 1/(L+1), which is what choose_L arranges for the Sato-Tate
    end intervals; other intervals can overshoot by ~1e-6 and are rejected.
    """
    if not 0 <= u < v <= 1:
        raise DomainError("need 0 <= u < v <= 1")
    if L < 1:
        raise DomainError("need L >= 1")
    M = L + 1
    k = np.arange(1, L + 1)
    phi = vaaler_weights(L)

    alpha = np.zeros(L + 1)
    for c, h in _reflected_intervals(u, v):
        alpha[0] += 2 * h
        alpha[1:] += 2 * phi * np.sin(2 * np.pi * k * h) * np.cos(2 * np.pi * k * c) / (np.pi * k)

    ends = _endpoints(u, v)
    beta = np.zeros(L + 1)
    for e in ends:
        # Delta_M(y - e) + Delta_M(y + e) = 2 + sum 4 (1 - k/M) cos(2 pi k e) cos(2 pi k y)
        beta[0] += 2
        beta[1:] += 4 * (1 - k / M) * np.cos(2 * np.pi * k * e)
    beta /= 2 * M

    nmax = 2 * L + 8
    a_cheb = ChebCoeffs(st_project(lambda th: _cos_eval(alpha, th), nmax, L))
    b_cheb = ChebCoeffs(st_project(lambda th: _cos_eval(beta, th), nmax, L))
    pair = SelbergPair(float(u), float(v), int(L), alpha, beta, a_cheb, b_cheb)

    audit = check_pair(pair)
    if audit["alpha_min"] < -GRID_TOL or audit["alpha_max"] > 1 + GRID_TOL:
        raise NumericalIntegrityError(f"minorant leaves [0, 1]: {audit}")
    if audit["sandwich_excess"] > GRID_TOL:
        raise NumericalIntegrityError(f"|chi - alpha| <= beta fails: {audit}")
    if audit["cheb_tail"] > 1e-9:
        raise NumericalIntegrityError(f"Chebyshev degree exceeds 2L: {audit}")
    return pair


def beta_fejer_form(pair: SelbergPair, x) -> np.ndarray:
    """beta evaluated from its defining Fejer-kernel form (independent of the coefficients)."""
    y = np.asarray(x, dtype=np.float64) / 2
    M = pair.L + 1
    out = np.zeros_like(y)
    for e in _endpoints(pair.u, pair.v):
        out += fejer_kernel(M, y - e) + fejer_kernel(M, y + e)
    return out / (2 * M)


# ---------------------------------------------------------------- the constant term


def choose_L(z: int, gamma: int) -> int:
    """Smallest L = -1 mod 2 gamma with 2L + 2 >= 6 z (1/2 - 1/gamma)^{-2} and L >= 47."""
    if z < 1 or z % 2 == 0:
        raise DomainError("z must be an odd positive integer")
    if gamma < 4 or gamma % 2:
        raise DomainError("gamma must be an even integer >= 4")
    width = Fraction(1, 2) - Fraction(1, gamma)
    need = 3 * z / width**2 - 1
    lo = max(math.ceil(need), L0)
    mod = 2 * gamma
    return lo + ((-1 - lo) % mod)


def gamma_intervals(gamma: int):
    """x-intervals for K >= 2cos(pi/2 - pi/gamma) and K <= -2cos(pi/2 - pi/gamma)."""
    w = 0.5 - 1.0 / gamma
    return (0.0, w), (1.0 - w, 1.0)


@dataclass(frozen=True)
class DeltaResult:
    value: float
    bound: float
    z: int
    gamma: int
    L: int
    I_plus: float
    I_minus: float
    beta_plus: float
    beta_minus: float
    beta_flag: bool
    indicator_measure: float

    @property
    def holds(self) -> bool:
        return self.value >= self.bound

    @property
    def corrected_bound(self) -> float:
        """1/2 mu_ST(interval)^{z+1}: the same statement with the true Sato-Tate mass."""
        return 0.5 * self.indicator_measure ** (self.z + 1)


def delta_constant(z: int, gamma: int, L: int | None = None, strict: bool = True) -> DeltaResult:
    """Constant term Delta of the product-minorant expansion and its claimed lower bound.

    Delta = I+^h I-^h - h (b+ I+^{h-1} I-^h + b- I+^h I-^{h-1}),  h = (z+1)/2,
    with I = int alpha d mu_ST and b = int beta d mu_ST both measured.
    With ``strict`` a value below 1/2 (1/2 - 1/gamma)^{z+1} raises.
    """
    if L is None:
        L = choose_L(z, gamma)
    (u1, v1), (u2, v2) = gamma_intervals(gamma)
    plus = selberg_pair(u1, v1, L)
    minus = selberg_pair(u2, v2, L)
    Ip, Im = plus.alpha_integral, minus.alpha_integral
    bp, bm = plus.beta_integral, minus.beta_integral
    h = (z + 1) // 2
    value = Ip**h * Im**h - h * (bp * Ip ** (h - 1) * Im**h + bm * Ip**h * Im ** (h - 1))
    bound = 0.5 * (0.5 - 1.0 / gamma) ** (z + 1)
    flag = max(bp, bm) > 2.0 / (L + 1)
    res = DeltaResult(value, bound, z, gamma, L, Ip, Im, bp, bm, flag,
                      st_interval_measure(0.0, math.pi * v1))
    if strict and not res.holds:
        raise NumericalIntegrityError(
            f"Delta = {value:.6g} is below 1/2 (1/2 - 1/gamma)^(z+1) = {bound:.6g} "
            f"(z={z}, gamma={gamma}, L={L}; int alpha = {Ip:.6g})"
        )
    return res
