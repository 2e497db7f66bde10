import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coded_caching import analytics as an

pairs = [(N, K) for K in range(3, 13) for N in range(2, K)]


def test_r_co_examples():
    assert an.r_co(2, 5, Fraction(4, 5)) == Fraction(9, 10)
    assert an.r_co(2, 10, 1) == Fraction(13, 18)
    for N, K in pairs:
        assert an.r_co(N, K, 0) == N
        assert an.r_co(N, K, N) == 0


def test_threshold_examples():
    th = an.m_threshold(2, 5)
    assert th.f_value == 1 and th.m_th == Fraction(6, 5) and th.exact
    th = an.m_threshold(4, 8)
    assert th.f_value == 289
    assert th.m_th == Fraction(2, 3)
    assert th.t_th == Fraction(4, 3)
    assert an.r_co(4, 8, th.m_th) == an.mns_coded_load(4, 8, th.m_th)


def test_discriminant_nonnegative():
    for K in range(3, 80):
        for N in range(2, K):
            assert an.f_discriminant(N, K) >= 0


@pytest.mark.parametrize("N,K", pairs)
def test_threshold_separates_schemes(N, K):
    th = an.m_threshold(N, K)
    for t in range(K + 1):
        M = Fraction(t * N, K)
        below = an.r_co(N, K, M) < an.mns_coded_load(N, K, M)
        assert below == (M < th.m_th)


@pytest.mark.parametrize("N,K", pairs)
def test_floor_t_threshold(N, K):
    th = an.m_threshold(N, K)
    assert an.floor_t_threshold(N, K) == math.floor(th.t_th)
    assert th.floor_t() == an.floor_t_threshold(N, K)


def test_centralized_curve_examples():
    c = an.centralized_curve(2, 10)
    assert c(1) == Fraction(13, 18)
    assert abs(float(c(1)) - 0.722) <= 0.001
    for N, K in pairs:
        c = an.centralized_curve(N, K)
        assert c(Fraction(1, K)) == N * (1 - Fraction(1, K))
        assert c(N) == 0
        assert c(0) == N


def test_mns_curves():
    assert abs(float(an.mns_centralized(2, 10)(1)) - 0.794) <= 0.001
    for N, K in pairs:
        m = an.mns_centralized(N, K)
        assert m(0) == N and m(N) == 0
        assert an.mns_decentralized(N, K, 0) == N
        assert an.mns_decentralized(N, K, N) == 0
    assert abs(an.mns_decentralized(4, 8, 1.2) - 2.1988) < 1e-3


@pytest.mark.parametrize("N,K", [(2, 10), (4, 8), (3, 7), (2, 5), (5, 9)])
def test_envelope_shape_and_dominance(N, K):
    c, m = an.centralized_curve(N, K), an.mns_centralized(N, K)
    s = c.envelope.slopes()
    assert all(x <= 0 for x in s)
    assert all(a <= b for a, b in zip(s, s[1:]))
    for j in range(101):
        M = Fraction(j * N, 100)
        assert c(M) <= m(M)
        assert an.r_co(N, K, M) <= N - M


@given(st.integers(3, 30).flatmap(lambda K: st.tuples(st.integers(1, K - 1), st.just(K))), st.fractions(0, 1))
def test_r_co_below_uncoded(nk, frac):
    N, K = nk
    M = frac * N
    assert an.r_co(N, K, M) <= N - M


def test_r_d_examples():
    assert abs(an.r_d(4, 8, 1.2) - 1.894) <= 0.001
    assert an.r_d(4, 8, Fraction(6, 5), exact=True) == Fraction(1183819, 625000)
    for N, K in pairs:
        assert an.r_d(N, K, 0) == pytest.approx(N)
        assert an.r_d(N, K, N) == pytest.approx(0, abs=1e-12)


def test_r_d_sum_vs_closed_random():
    rng = random.Random(11)
    for _ in range(100):
        K = rng.randint(3, 25)
        N = rng.randint(2, K - 1)
        M = rng.uniform(0, N)
        assert abs(an.r_d_sum(N, K, M) - an.r_d_closed(N, K, M)) <= 1e-9


def test_r_d_exact_forms_agree():
    for N, K in pairs[:20]:
        for j in range(1, 10):
            M = Fraction(j * N, 10)
            assert an.r_d_sum(N, K, M, exact=True) == an.r_d_closed(N, K, M, exact=True)


@pytest.mark.parametrize("N,K", [(4, 8), (2, 10), (3, 7), (5, 16)])
def test_r_d_non_increasing(N, K):
    vals = [an.r_d(N, K, N * j / 199) for j in range(200)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_level_choice_matches_threshold():
    for N, K in pairs:
        x = an.floor_t_threshold(N, K)
        for l in range(K):
            two, mns = an.level_two_step(N, K, l), an.level_mns(K, l)
            if l <= x:
                assert two <= mns
            else:
                assert two >= mns


def test_memory_grid_contains_corners():
    g = an.memory_grid(2, 10, 20)
    assert Fraction(1, 10) in g and Fraction(1) in g and g[0] == 0 and g[-1] == 2
