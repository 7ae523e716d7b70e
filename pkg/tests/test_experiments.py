import math

import numpy as np
import pytest

from kloostermax.errors import DomainError
from kloostermax.experiments import (
    P_curve,
    SignCondition,
    SignPattern,
    block_bound_shape,
    block_moment,
    block_sums,
    detector_chain,
    equidist_matrix,
    epsilon_for,
    max_moments,
    moments_from_maxima,
    sign_pattern_search,
    tail_distribution,
)
from kloostermax.families import FamilySpec, batch_complete_sums, member_values
from kloostermax.incomplete import max_scan
from kloostermax.modular import MoebiusMap
from kloostermax.selberg import st_integrate

P = 10007


@pytest.fixture(scope="module")
def master():
    return batch_complete_sums(FamilySpec.kloosterman_dilate(), P)


def test_empty_pattern(master):
    rep = sign_pattern_search(master, SignPattern(), with_maxima=False)
    assert rep.count == P - 1 and rep.density == 1 and rep.predicted_density == 1


def test_single_condition(master):
    pat = SignPattern.dilations([1], P)
    rep = sign_pattern_search(master, pat, with_maxima=False)
    assert 0.5 * 0.090845 <= rep.density <= 2 * 0.090845
    quad = st_integrate(lambda th: 1.0 if 2 * math.cos(th) >= math.sqrt(2) else 0.0, points=[math.pi / 4])
    assert rep.predicted_density == pytest.approx(quad, abs=1e-9)
    assert all(master.sums[a] >= math.sqrt(2) for a in rep.members)


def test_pair_condition(master):
    rep = sign_pattern_search(master, SignPattern.dilations([1, -1], P))
    assert rep.count > 0
    assert 0.090845**2 / 3 <= rep.density <= 3 * 0.090845**2
    assert rep.z == 1 and set(rep.maxima) == set(rep.members)
    for a in rep.members:
        assert master.sums[a] >= math.sqrt(2) and master.sums[(P - a) % P] <= -math.sqrt(2)


def test_pattern_validation():
    p = 101
    m = MoebiusMap.dilation(2, p)
    with pytest.raises(DomainError):
        SignPattern((SignCondition(m, 1), SignCondition(MoebiusMap(4, 0, 0, 2, p), -1)))
    with pytest.raises(DomainError):
        SignCondition(m, 0)
    with pytest.raises(DomainError):
        SignPattern.odd_harmonics(4, p)


def test_point_at_infinity_fails_condition():
    p = 101
    table = batch_complete_sums(FamilySpec.kloosterman_dilate(), p)
    inv = MoebiusMap(0, 1, 1, 0, p)  # a -> 1/a, never infinite on F_p^x
    shifted = MoebiusMap(1, 0, 1, 1, p)  # a -> a/(a+1), infinite at a = -1
    lo = SignPattern((SignCondition(shifted, 1),), threshold=-10.0)
    rep = sign_pattern_search(table, lo, with_maxima=False)
    assert p - 1 not in rep.members and rep.count == p - 2
    assert sign_pattern_search(table, SignPattern((SignCondition(inv, 1),), threshold=-10.0)).count == p - 1


def test_detector_chain_small():
    rep = detector_chain(10007, 1)
    assert rep.rows and rep.all_ok
    assert rep.search.epsilon == pytest.approx(epsilon_for(1, 10007)) == 1.0


def test_moments_constant_and_power_mean():
    assert moments_from_maxima(np.full(10, 1.5), [1, 2]) == pytest.approx([1.5**2, 1.5**4])
    rep = max_moments(FamilySpec.kloosterman_dilate(), 1009, [1, 2, 3, 4])
    r = rep.roots()
    assert all(x <= y for x, y in zip(r, r[1:]))
    assert not rep.sampled and rep.sample_size == 1008
    assert math.isnan(P_curve(2)) and P_curve(3) > 0


def test_moments_match_brute_force():
    p = 1009
    fam = FamilySpec.kloosterman_dilate()
    rep = max_moments(fam, p, [1, 2])
    M = []
    for a in range(1, p):
        t = member_values(fam, a, p)
        S = np.concatenate([[0], np.cumsum(t)[:-1]]) / math.sqrt(p)
        M.append(np.max(np.abs(S)))
    M = np.array(M)
    assert rep.moments == pytest.approx([np.mean(M**2), np.mean(M**4)], rel=1e-6)


def test_sampled_moments_are_seeded():
    fam = FamilySpec.birch_dilate()
    a = max_moments(fam, 1009, [1], sample=1000, seed=4)
    b = max_moments(fam, 1009, [1], sample=1000, seed=4)
    assert a.sampled and a.seed == 4 and a.moments == b.moments


def test_tails():
    p = 1009
    fam = FamilySpec.kloosterman_dilate()
    _, M, _ = max_scan(fam, p)
    grid = [0.0, 0.5, 1.0, 1.5, 2 * math.log(3 * p)]
    tails = tail_distribution(fam, p, grid)
    fr = [f for _, f in tails]
    assert fr[0] == 1.0 and fr[-1] == 0.0
    assert all(x >= y for x, y in zip(fr, fr[1:]))
    assert tails[2][1] == sum(1 for m in M if m > 1.0) / (p - 1)


def test_equidistribution(master):
    maps = [MoebiusMap.identity(P), MoebiusMap.dilation(2, P)]
    rep = equidist_matrix(master, maps, 8)
    assert np.all(rep.single[:, 0] == (P - 1) / math.sqrt(P))
    for n in range(1, 9):
        assert abs(rep.single[0, n]) <= 4 * (n + 1) ** 2
    assert abs(rep.pairs[(0, 1)][1, 1]) <= 16
    with pytest.raises(DomainError):
        equidist_matrix(master, maps, 17)
    with pytest.raises(DomainError):
        equidist_matrix(master, [maps[0], maps[0]], 2)


def test_block_moment_brute_force():
    p = 101
    fam = FamilySpec.birch_dilate()
    for alpha, beta in ((0.0, 1.0), (0.0, 0.5), (0.3, 0.7)):
        lo, hi = math.floor(alpha * p) + 1, math.floor(beta * p)
        vals = []
        for a in range(1, p):
            t = member_values(fam, a, p)
            vals.append(abs(sum(t[x % p] for x in range(lo, hi + 1)) / math.sqrt(p)) ** 2)
        assert block_moment(fam, p, alpha, beta, 1) == pytest.approx(np.mean(vals), rel=1e-12)
    assert block_moment(fam, p, 0.0, 0.5, 2) >= 0
    # (0, 1] runs over the whole field: the complete sum including x = 0
    full = block_sums(fam, p, 0.0, 1.0)
    assert full.shape == (p - 1,)


def test_block_moment_trend():
    p = 1009
    fam = FamilySpec.kloosterman_dilate()
    v = [block_moment(fam, p, 0.0, w, 2) for w in (1 / 2, 1 / 8, 1 / 32)]
    pairs = [(0, 1), (1, 2), (0, 2)]
    assert sum(v[i] > v[j] for i, j in pairs) >= 2
    assert block_bound_shape(p, 0, 0.5, 2) > 0
    with pytest.raises(DomainError):
        block_moment(fam, p, 0.5, 0.5, 1)
