"""Acceptance criteria, one test per criterion at the stated tolerances and time limits."""

import random
import time
from fractions import Fraction

import numpy as np

from coded_caching import analytics as an
from coded_caching.bounds import certify_optimality_n2, closed_form_bound_n2, lp_bound
from coded_caching.combinatorics import binom, pascal_check, vandermonde_known, vandermonde_total
from coded_caching.delivery import build_groups, encode_step1, encode_step2, known_step1_bits, mns_deliver, verify_all_users
from coded_caching.gf import GF
from coded_caching.model import demands, make_instance, random_payloads, random_surjective_demand, rng_for, worst_case_demand
from coded_caching.placement import place_centralized
from coded_caching.simulation import simulate
from coded_caching.verify import brute_known, brute_total


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_1_worked_example():
    with Timer() as tm:
        inst = make_instance(2, 5, Fraction(4, 5), 1000)
        d = demands([1, 1, 1, 2, 2], 2)
        F = inst.F
        p = place_centralized(inst)
        payloads = random_payloads(inst, rng_for(0, "payload"))
        gf = GF(8)
        groups = build_groups(p, d)
        sizes = [g.coded_bits for g in groups]
        assert sizes == [F // 10, F // 5, F // 5, F // 10, 0] + [F // 10] * 3 + [F // 10] * 3
        inv = encode_step1(groups, p, payloads, gf, rng_for(0, "step1"))
        assert sum(gc.bits for gc in inv) == 6 * F // 5
        assert set(known_step1_bits(inv, 5).values()) == {3 * F // 10}
        msg = encode_step2(inv, p, d, seed=0, gf=gf)
        assert msg.transmitted_bits == 9 * F // 10 == 900
        assert all(verify_all_users(msg, p, payloads).values())
        mns = mns_deliver(p, d, payloads, gf)
        assert mns.transmitted_bits == 1000
        assert all(verify_all_users(mns, p, payloads).values())
    assert tm.elapsed < 1


def test_criterion_2_thresholds():
    with Timer() as tm:
        assert an.m_threshold(2, 5).m_th == Fraction(6, 5)
        th = an.m_threshold(4, 8)
        assert th.f_value == 289 and th.m_th == Fraction(2, 3)
        for N, K in [(2, 5), (4, 8)]:
            m_th = an.m_threshold(N, K).m_th
            for t in range(K + 1):
                M = Fraction(t * N, K)
                assert (an.r_co(N, K, M) < an.mns_coded_load(N, K, M)) == (M < m_th)
    assert tm.elapsed < 1


def test_criterion_3_centralized_corners():
    with Timer() as tm:
        prop = an.centralized_curve(2, 10)(1)
        mns = an.mns_centralized(2, 10)(1)
        assert prop == Fraction(13, 18)
        assert abs(float(prop) - 0.722) <= 0.001
        assert abs(float(mns) - 0.794) <= 0.001
    assert tm.elapsed < 1


def test_criterion_4_decentralized_formula():
    with Timer() as tm:
        assert abs(an.r_d(4, 8, 1.2) - 1.894) <= 0.001
        rng = random.Random(2024)
        for _ in range(100):
            K = rng.randint(3, 20)
            N = rng.randint(2, K - 1)
            M = rng.uniform(0, N)
            assert abs(an.r_d_sum(N, K, M) - an.r_d_closed(N, K, M)) <= 1e-9
    assert tm.elapsed < 1


def test_criterion_5_decentralized_simulation():
    inst = make_instance(4, 8, "1.2", 100_000)
    target = an.r_d(4, 8, 1.2)
    loads = []
    with Timer() as tm:
        for seed in range(5):
            rep = simulate(inst, mode="decentralized", demands=worst_case_demand(inst), seed=seed)
            assert rep.success, f"seed {seed}: decode failure"
            loads.append(float(rep.load))
    errors = [x / target - 1 for x in loads]
    assert tm.elapsed < 60
    assert all(abs(e) <= 0.02 for e in errors), f"R_d={target:.6f}, loads={loads}, relative errors={errors}"


def test_criterion_6_outer_bound():
    with Timer() as tm:
        assert lp_bound(2, 5, Fraction(4, 5)).value == Fraction(9, 10)
        for K in range(3, 11):
            for j in range(40):
                M = Fraction(2 * j, 39)
                assert closed_form_bound_n2(K, M) == lp_bound(2, K, M).value
            assert certify_optimality_n2(K).certified
    assert tm.elapsed < 30


def test_criterion_7_identities_and_exact_loads():
    with Timer() as tm:
        for K in range(2, 11):
            for t in range(0, K + 1):
                for j in range(0, t + 1):
                    for g in range(1, K + 1):
                        assert pascal_check(g, t, j)
                for g in range(1, K + 1):
                    assert vandermonde_total(g, K, t) == brute_total(g, K, t)
                    if g <= K - 1:
                        assert vandermonde_known(g, K, t) == brute_known(g, K, t)
        rng = np.random.default_rng(7)
        cases = 0
        for K in range(3, 9):
            for N in range(2, K):
                for t in range(K + 1):
                    for _ in range(2):
                        inst = make_instance(N, K, Fraction(t * N, K), binom(K, t), mode="centralized")
                        rep = simulate(inst, demands=random_surjective_demand(N, K, rng), seed=cases)
                        assert rep.success
                        assert rep.transmitted_bits == an.r_co(N, K, inst.M) * inst.F
                        cases += 1
        assert cases >= 200
    assert tm.elapsed < 120


def test_criterion_8_monotonicity_and_dominance():
    with Timer() as tm:
        for N, K in [(2, 10), (4, 8), (3, 7)]:
            c, m = an.centralized_curve(N, K), an.mns_centralized(N, K)
            s = c.envelope.slopes()
            assert all(x <= 0 for x in s) and all(a <= b for a, b in zip(s, s[1:]))
            for t in range(K + 1):
                M = Fraction(t * N, K)
                assert an.r_co(N, K, M) <= N - M
            for j in range(100):
                M = Fraction(j * N, 99)
                assert c(M) <= m(M)
    assert tm.elapsed < 5
