"""Identity and round-trip checks behind ``coded-caching verify``."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .analytics import floor_t_threshold, level_mns, level_two_step, r_d_closed, r_d_sum
from .combinatorics import binom, pascal_check, vandermonde_known, vandermonde_total
from .simulation import random_centralized_case, simulate


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def brute_total(g: int, K: int, t: int) -> int:
    """Enumerate leftover sets J outside a size-g demand group."""
    others = range(g, K)
    lo = max(0, t - g + 1)
    return sum(binom(g - 1, t - len(J)) for k in range(lo, t + 1) for J in combinations(others, k))


def brute_known(g: int, K: int, t: int) -> int:
    """As brute_total, restricted to J containing one fixed outside user."""
    others = range(g, K)
    j = g
    lo = max(0, t - g + 1)
    return sum(
        binom(g - 1, t - len(J)) for k in range(lo, t + 1) for J in combinations(others, k) if j in J
    )


def check_pascal(kmax: int = 12) -> CheckResult:
    bad = [(g, t, j) for g in range(1, kmax + 1) for t in range(0, kmax + 1) for j in range(0, t + 1) if not pascal_check(g, t, j)]
    return CheckResult("pascal", not bad, f"{len(bad)} failures for g<={kmax}")


def check_vandermonde(kmax: int = 10) -> CheckResult:
    n = 0
    for K in range(2, kmax + 1):
        for t in range(0, K + 1):
            for g in range(1, K + 1):
                if vandermonde_total(g, K, t) != brute_total(g, K, t):
                    return CheckResult("vandermonde", False, f"total mismatch at g={g}, K={K}, t={t}")
                n += 1
                if g <= K - 1 and vandermonde_known(g, K, t) != brute_known(g, K, t):
                    return CheckResult("vandermonde", False, f"known mismatch at g={g}, K={K}, t={t}")
    return CheckResult("vandermonde", True, f"{n} (g,K,t) triples with K<={kmax}")


def check_level_threshold(kmax: int = 12) -> CheckResult:
    n = 0
    for K in range(3, kmax + 1):
        for N in range(2, K):
            x = floor_t_threshold(N, K)
            for l in range(K):
                two, mns = level_two_step(N, K, l), level_mns(K, l)
                if (l <= x and two > mns) or (l > x and two < mns):
                    return CheckResult("level-threshold", False, f"N={N}, K={K}, level={l}")
                n += 1
    return CheckResult("level-threshold", True, f"{n} levels")


def check_rd_forms(trials: int = 100, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(trials):
        K = rng.randint(3, 20)
        N = rng.randint(2, K - 1)
        M = rng.uniform(0, N)
        worst = max(worst, abs(r_d_sum(N, K, M) - r_d_closed(N, K, M)))
    return CheckResult("rd-sum-vs-closed", worst <= 1e-9, f"max |diff| = {worst:.2e} over {trials}")


def check_decode_battery(trials: int = 200, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    failures = 0
    for n in range(trials):
        inst, d = random_centralized_case(rng)
        rep = simulate(inst, demands=d, seed=seed + n)
        if not (rep.success and rep.exact_match):
            failures += 1
    return CheckResult("decode-battery", failures == 0, f"{trials - failures}/{trials} exact recoveries")


def run_all(trials: int = 200, quick: bool = False) -> list[CheckResult]:
    if quick:
        return [
            check_pascal(8),
            check_vandermonde(7),
            check_level_threshold(8),
            check_rd_forms(20),
            check_decode_battery(min(trials, 20)),
        ]
    return [check_pascal(), check_vandermonde(), check_level_threshold(), check_rd_forms(), check_decode_battery(trials)]
