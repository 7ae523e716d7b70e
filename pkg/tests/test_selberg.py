import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kloostermax.errors import DomainError, NumericalIntegrityError
from kloostermax.selberg import (
    ChebCoeffs,
    beta_fejer_form,
    check_pair,
    cheb_u,
    cheb_u_all,
    choose_L,
    cosine_to_cheb,
    delta_constant,
    selberg_pair,
    st_integrate,
    st_interval_measure,
    st_project,
    vaaler_weights,
)

QUARTER = 0.25 - 1 / (2 * math.pi)  # mu_ST([0, pi/4])


@settings(max_examples=60)
@given(st.integers(0, 60), st.floats(0.01, math.pi - 0.01))
def test_cheb_u_trig_identity(n, theta):
    assert cheb_u(n, 2 * math.cos(theta)) == pytest.approx(math.sin((n + 1) * theta) / math.sin(theta), abs=1e-9)


def test_cheb_u_endpoints_and_domain():
    assert cheb_u(5, 2.0) == 6
    assert cheb_u(5, -2.0) == -6
    assert np.allclose(cheb_u_all(4, [0.0]).ravel(), [1, 0, -1, 0, 1])
    with pytest.raises(DomainError):
        cheb_u(3, 2.0000001)
    with pytest.raises(DomainError):
        cheb_u(-1, 0.0)


@pytest.mark.parametrize("m,n", [(0, 0), (1, 1), (3, 3), (2, 5), (0, 4)])
def test_orthonormality(m, n):
    val = st_integrate(lambda th: cheb_u(m, 2 * math.cos(th)) * cheb_u(n, 2 * math.cos(th)))
    assert val == pytest.approx(1.0 if m == n else 0.0, abs=1e-9)


def test_sato_tate_mass_of_quarter_interval():
    val = st_integrate(lambda th: 1.0 if th <= math.pi / 4 else 0.0, points=[math.pi / 4])
    assert val == pytest.approx(QUARTER, abs=1e-9)
    assert QUARTER == pytest.approx(0.090845, abs=1e-6)
    assert st_interval_measure(0, math.pi) == pytest.approx(1.0)


@settings(max_examples=30)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=20))
def test_projection_matches_exact_conversion(coeffs):
    a = np.array(coeffs)
    f = lambda th: np.cos(np.outer(np.atleast_1d(th), np.arange(len(a)))) @ a
    proj = st_project(f, len(a) + 3, len(a) - 1)
    exact = cosine_to_cheb(a)
    assert np.allclose(proj[: len(a)], exact, atol=1e-12)
    assert np.allclose(proj[len(a):], 0, atol=1e-12)
    theta = np.linspace(0.1, 3.0, 7)
    assert np.allclose(ChebCoeffs(exact)(theta), f(theta), atol=1e-10)


def test_vaaler_weights_range():
    w = vaaler_weights(47)
    assert np.all((w > 0) & (w <= 1))
    assert np.all(np.diff(w) < 0)


@pytest.mark.parametrize("L", [47, 143, 151, 239])
@pytest.mark.parametrize("uv", [(0.0, 0.25), (0.75, 1.0)])
def test_pair_invariants(L, uv):
    pair = selberg_pair(*uv, L)
    a = check_pair(pair)
    assert a["alpha_min"] >= -1e-12 and a["alpha_max"] <= 1 + 1e-12
    assert a["sandwich_excess"] <= 1e-12
    assert a["cheb_max"] <= 1 + 1e-6
    assert a["cheb_tail"] <= 1e-9 and pair.alpha_cheb.degree <= 2 * L
    assert a["beta_l2_squared"] <= a["beta_l2_bound"]
    # beta integrates to 1/(L+1) against mu_ST for these end intervals
    assert pair.beta_integral == pytest.approx(1 / (L + 1), abs=1e-12)
    assert np.allclose(cosine_to_cheb(pair.alpha), pair.alpha_cheb.coefficients[: L + 1], atol=1e-12)


def test_beta_is_the_fejer_form():
    pair = selberg_pair(0.0, 0.25, 47)
    x = np.linspace(0, 1, 1001)
    assert np.allclose(beta_fejer_form(pair, x), pair.beta_at(x), atol=1e-12)
    assert np.all(pair.beta_at(x) >= -1e-15)


def test_alpha_tracks_the_indicator_mass():
    pair = selberg_pair(0.0, 0.25, 239)
    assert pair.alpha_integral == pytest.approx(QUARTER, abs=1 / 240)
    # alpha(x) at theta = pi x agrees with its Chebyshev expansion
    x = np.array([0.05, 0.4, 0.9])
    assert np.allclose(pair.alpha_at(x), pair.alpha_cheb(np.pi * x), atol=1e-10)


def test_full_interval_and_bad_input():
    pair = selberg_pair(0.0, 1.0, 47)
    assert np.allclose(pair.alpha_at(np.linspace(0, 1, 50)), 1.0)
    with pytest.raises(DomainError):
        selberg_pair(0.5, 0.5, 47)
    with pytest.raises(DomainError):
        selberg_pair(0.0, 0.5, 0)


def test_interior_interval_overshoot_is_rejected():
    with pytest.raises(NumericalIntegrityError):
        selberg_pair(0.2, 0.6, 47)


def test_choose_L_values():
    assert [choose_L(z, 4) for z in (1, 3, 5)] == [47, 143, 239]
    assert choose_L(1, 6) == 47
    assert choose_L(7, 4) == 335


@settings(max_examples=40)
@given(st.integers(0, 20), st.integers(2, 8))
def test_choose_L_is_minimal(k, half_gamma):
    z, gamma = 2 * k + 1, 2 * half_gamma
    L = choose_L(z, gamma)
    need = lambda L: (2 * L + 2) * (0.5 - 1 / gamma) ** 2 >= 6 * z - 1e-9 and L >= 47
    assert (L + 1) % (2 * gamma) == 0 and need(L)
    assert not need(L - 2 * gamma)


def test_choose_L_domain():
    with pytest.raises(DomainError):
        choose_L(2, 4)
    with pytest.raises(DomainError):
        choose_L(1, 5)


@pytest.mark.parametrize("z", [1, 3, 5])
def test_delta_constant_values(z):
    r = delta_constant(z, 4, strict=False)
    assert r.I_plus == pytest.approx(r.I_minus, abs=1e-14)
    assert not r.beta_flag
    assert r.value > 0
    # with the true Sato-Tate mass of the end interval the bound holds
    assert r.value >= r.corrected_bound
    assert r.indicator_measure == pytest.approx(QUARTER)


def test_delta_strict_mode_reports_violation():
    with pytest.raises(NumericalIntegrityError):
        delta_constant(1, 4)
