import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kloostermax.chirp import chirp_dft, direct_dft
from kloostermax.errors import DomainError, NumericalIntegrityError
from kloostermax.families import (
    FamilySpec,
    SumTable,
    angle_table,
    batch_complete_sums,
    birch,
    check_table,
    complete_sum,
    fourier_map,
    kloosterman,
    master_table,
    member_values,
    phase_value,
)
from kloostermax.modular import moebius_apply

# frozen from an independent pure-Python evaluation with math.fsum
KL_101 = {1: 0.15182100099346238, 2: -1.6451258850355477, 50: -1.0741642763900427}
BI_101 = {1: 0.5277981740004608, 2: 0.8378341623272256, 50: 0.9940726749284167}


def test_kloosterman_small_closed_form():
    assert kloosterman(1, 1, 5) == pytest.approx((3 - math.sqrt(5)) / (2 * math.sqrt(5)), abs=1e-14)
    assert round(kloosterman(1, 1, 5), 6) == 0.170820


def test_birch_seven():
    v = birch(1, 1, 7)
    assert v == pytest.approx(-1.0174884768541934, abs=1e-12)
    assert abs(v - (-1.017396)) <= 1e-4


@pytest.mark.parametrize("a", sorted(KL_101))
def test_frozen_values(a):
    assert kloosterman(a, 1, 101) == pytest.approx(KL_101[a], abs=1e-12)
    assert birch(a, 1, 101) == pytest.approx(BI_101[a], abs=1e-12)
    assert kloosterman(3, 7, 1009) == pytest.approx(-1.5404799807903427, abs=1e-12)


@settings(max_examples=40)
@given(st.sampled_from([101, 1009]), st.integers(1, 10**6), st.integers(1, 10**6))
def test_weil_and_symmetries(p, a, b):
    if a % p == 0 or b % p == 0:
        return
    v = kloosterman(a, b, p)
    assert abs(v) <= 2 + 1e-9
    assert v == pytest.approx(kloosterman(b, a, p), abs=1e-12)
    assert v == pytest.approx(kloosterman(a * b % p, 1, p), abs=1e-12)


def test_zero_parameter_kloosterman_is_ramanujan():
    # sum over x != 0 of e(x/p) is -1
    p = 101
    assert kloosterman(0, 1, p) == pytest.approx(-1 / math.sqrt(p), abs=1e-13)


def test_family_validation():
    with pytest.raises(DomainError):
        FamilySpec("nonsense")
    with pytest.raises(DomainError):
        FamilySpec.kloosterman_curve(101).validate(101)
    with pytest.raises(DomainError):
        FamilySpec.laurent(((0, 1),))
    with pytest.raises(DomainError):
        phase_value(FamilySpec.kloosterman_dilate(), 1, 101, 101)


def test_phase_values():
    p = 13
    fam = FamilySpec.birch_dilate()
    for x in range(p):
        expected = np.exp(2j * np.pi * ((x + 5 * x**3) % p) / p)
        assert phase_value(fam, 5, x, p) == pytest.approx(expected, abs=1e-14)
    assert phase_value(FamilySpec.kloosterman_dilate(), 3, 0, p) == 0


@settings(max_examples=25)
@given(st.integers(3, 400).filter(lambda n: all(n % d for d in range(2, int(n**0.5) + 1))),
       st.integers(0, 10**6))
def test_chirp_matches_direct(p, seed):
    rng = np.random.default_rng(seed)
    t = rng.normal(size=p) + 1j * rng.normal(size=p)
    assert np.allclose(chirp_dft(t), direct_dft(t), atol=1e-9 * p)


def test_table_sign_conventions():
    p = 101
    m = batch_complete_sums(FamilySpec.kloosterman_dilate("minus"), p)
    pl = batch_complete_sums(FamilySpec.kloosterman_dilate("plus"), p)
    assert np.allclose(m.values, -pl.values, atol=1e-13)
    assert np.allclose(m.sums, pl.sums, atol=1e-13)
    # the master table of t(x) = e(x^{-1}/p) is Kl(y, 1; p)
    for y in (1, 2, 50):
        assert pl.sums[y] == pytest.approx(KL_101[y], abs=1e-12)


def test_birch_table_includes_origin():
    p = 101
    t = batch_complete_sums(FamilySpec.birch_shift("plus"), p, 0)
    for y in (1, 2, 50):
        assert t.values[y].real == pytest.approx(BI_101[y] + 1 / math.sqrt(p), abs=1e-12)


@settings(max_examples=30)
@given(st.sampled_from(["kloosterman_shift", "kloosterman_dilate", "kloosterman_curve", "birch_shift"]),
       st.integers(1, 100), st.integers(1, 100))
def test_fourier_maps(kind, a, y):
    p = 101
    fam = FamilySpec(kind, 3)
    master = master_table(fam, p)
    member = batch_complete_sums(fam, p, a)
    tau = fourier_map(fam, y, p)
    assert member.values[y] == pytest.approx(master.values[moebius_apply(tau, a)], abs=1e-12)


def test_direct_and_chirp_tables_agree():
    p = 1009
    fam = FamilySpec.laurent(((2, 1), (-1, 3)))
    a = batch_complete_sums(fam, p, 7)
    b = batch_complete_sums(fam, p, 7, method="direct")
    assert np.allclose(a.values, b.values, atol=1e-10)
    assert a.max_abs_error_estimate < 1e-10


def test_check_table_rejects_corruption():
    p = 101
    t = batch_complete_sums(FamilySpec.kloosterman_dilate(), p)
    vals = t.values.copy()
    vals[5] = 3.0
    with pytest.raises(NumericalIntegrityError):
        check_table(SumTable(p, t.family, 1, vals, "chirp_dft"))


def test_non_real_family():
    p = 101
    fam = FamilySpec.laurent(((2, 1),), sign="plus")
    assert not fam.is_real
    v = complete_sum(fam, 3, p)
    assert isinstance(v, complex)
    # Gauss sum magnitude: |sum over all x| = sqrt p, so dropping x = 0 moves it by at most 1/sqrt p
    assert abs(abs(v + 1 / math.sqrt(p)) - 1) < 1e-12


def test_member_values_and_angles():
    p = 101
    fam = FamilySpec.kloosterman_dilate("plus")
    t = member_values(fam, 1, p)
    assert t[0] == 0 and abs(abs(t[1]) - 1) < 1e-15
    ang = angle_table(batch_complete_sums(fam, p))
    assert np.all((ang.angles >= 0) & (ang.angles <= np.pi))


def test_curve_master_is_kloosterman():
    p = 101
    fam = FamilySpec.kloosterman_curve(3, "plus")
    assert np.allclose(master_table(fam, p).values[1:].real, [kloosterman(z, 1, p) for z in range(1, p)], atol=1e-12)
    with pytest.raises(DomainError):
        master_table(FamilySpec.birch_dilate(), p)


def test_small_examples():
    assert phase_value(FamilySpec.kloosterman_shift(1), 1, 2, 5) == pytest.approx(1 + 0j, abs=1e-15)
    assert phase_value(FamilySpec.birch_dilate(), 0, 0, 7) == 1
    assert kloosterman(2, 3, 7) == pytest.approx(kloosterman(6, 1, 7), abs=1e-14)
