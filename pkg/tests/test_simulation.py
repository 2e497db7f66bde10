from fractions import Fraction

import numpy as np

from coded_caching.analytics import r_co
from coded_caching.gf import GF
from coded_caching.model import demands, make_instance
from coded_caching.simulation import random_centralized_case, simulate
from coded_caching.verify import check_decode_battery, check_level_threshold, check_rd_forms


def test_simulate_example_report(example):
    inst, d = example
    rep = simulate(inst, demands=d)
    assert rep.transmitted_bits == 900 and rep.load == Fraction(9, 10)
    assert rep.success and rep.exact_match and rep.formula_load == 0.9
    assert rep.to_dict()["M"] == "4/5"


def test_simulate_gf16(example):
    inst, d = example
    rep = simulate(inst, demands=d, gf=GF(16), seed=5)
    assert rep.success and rep.transmitted_bits == 900


def test_simulate_non_surjective_has_no_worst_case_formula():
    inst = make_instance(2, 5, Fraction(4, 5), 20)
    rep = simulate(inst, demands=demands([1, 1, 1, 1, 1], 2))
    assert rep.success and rep.exact_match and rep.formula_load is None


def test_random_cases_match_formula():
    rng = np.random.default_rng(7)
    for n in range(30):
        inst, d = random_centralized_case(rng)
        rep = simulate(inst, demands=d, seed=n)
        assert rep.success
        assert rep.load == r_co(inst.N, inst.K, inst.M)


def test_verify_checks():
    assert check_level_threshold(10).passed
    assert check_rd_forms(50).passed
    assert check_decode_battery(10).passed


def test_decentralized_load_converges_with_file_length():
    """Finite-F excess over R_d comes from unequal subfile sizes and shrinks like 1/sqrt(F)."""
    errs = []
    for F in (25_000, 100_000, 400_000):
        rep = simulate(make_instance(4, 8, "1.2", F), mode="decentralized", seed=0)
        assert rep.success
        errs.append(float(rep.load) / rep.formula_load - 1)
    assert all(e > 0 for e in errs)
    assert errs[0] > errs[1] > errs[2]
    # quadrupling F roughly halves the excess
    assert 0.35 < errs[1] / errs[0] < 0.65 and 0.35 < errs[2] / errs[1] < 0.65
    assert errs[2] < 0.02
