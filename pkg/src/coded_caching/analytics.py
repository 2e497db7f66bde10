"""
Closed-form memory-load curves.

Centralized quantities are exact Fractions. Decentralized loads are floats by
default; pass ``exact=True`` with a rational M to get a Fraction instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .combinatorics import PiecewiseLinear, as_fraction, binom, lower_convex_envelope
from .errors import NegativeDiscriminant

SUM_VS_CLOSED_TOL = 1e-9


@dataclass(frozen=True)
class CurvePoint:
    M: Fraction
    R: Fraction | float
    scheme: str


@dataclass(frozen=True)
class TradeoffCurve:
    """Achievable (M, R) corner points and their lower convex envelope."""

    scheme: str
    points: tuple[CurvePoint, ...]
    envelope: PiecewiseLinear

    def __call__(self, M) -> Fraction:
        return self.envelope(M)

    @classmethod
    def from_points(cls, scheme: str, pts) -> "TradeoffCurve":
        pts = tuple(CurvePoint(as_fraction(m), as_fraction(r), scheme) for m, r in pts)
        return cls(scheme, pts, lower_convex_envelope((p.M, p.R) for p in pts))


@dataclass(frozen=True)
class Threshold:
    N: int
    K: int
    f_value: int
    m_th: Fraction | float
    t_th: Fraction | float

    @property
    def exact(self) -> bool:
        return isinstance(self.m_th, Fraction)

    def floor_t(self) -> int:
        """floor(t_th) computed with integer arithmetic only."""
        return floor_t_threshold(self.N, self.K)


def _check(N: int, K: int) -> None:
    if not 1 <= N < K:
        raise ValueError(f"need 1 <= N < K, got N={N}, K={K}")


# -- centralized -----------------------------------------------------------


def r_co(N: int, K: int, M) -> Fraction:
    """Two-step delivery load N - M - M(N-1)K(N-M) / (N^2 (K-1))."""
    _check(N, K)
    M = as_fraction(M)
    return N - M - M * (N - 1) * K * (N - M) / (N * N * (K - 1))


def mns_coded_load(N: int, K: int, M) -> Fraction:
    """K(1-M/N) / (1+KM/N): the XOR delivery alone."""
    M = as_fraction(M)
    return K * (1 - M / N) / (1 + K * M / N)


def mns_load(N: int, K: int, M) -> Fraction:
    """K(1-M/N) min{1/(1+KM/N), N/K}."""
    M = as_fraction(M)
    return K * (1 - M / N) * min(1 / (1 + K * M / N), Fraction(N, K))


def f_discriminant(N: int, K: int) -> int:
    return (N * K - 2 * N + 1) ** 2 - 4 * (N - 1) * (K - N) * (K - 1)


def m_threshold(N: int, K: int) -> Threshold:
    """Memory below which the two-step load beats the XOR delivery.

    Exact when f(N,K) is a perfect square, a float otherwise.
    """
    _check(N, K)
    if N < 2:
        raise ValueError("threshold needs N >= 2")
    f = f_discriminant(N, K)
    if f < 0:
        raise NegativeDiscriminant(N, K, f)
    a = N * K - 2 * N + 1
    root = math.isqrt(f)
    if root * root == f:
        m = Fraction(N * (a - root), 2 * K * (N - 1))
        return Threshold(N, K, f, m, K * m / N)
    m = N * (a - math.sqrt(f)) / (2 * K * (N - 1))
    return Threshold(N, K, f, m, K * m / N)


def floor_t_threshold(N: int, K: int) -> int:
    """Largest integer l with l <= t_th, where t_th = (a - sqrt f) / (2(N-1))."""
    f = f_discriminant(N, K)
    if f < 0:
        raise NegativeDiscriminant(N, K, f)
    a = N * K - 2 * N + 1
    # l <= t_th  <=>  sqrt(f) <= a - 2(N-1) l
    lo = -1
    for l in range(K + 1):
        rhs = a - 2 * (N - 1) * l
        if rhs >= 0 and rhs * rhs >= f:
            lo = l
        else:
            break
    return lo


def centralized_points(N: int, K: int) -> list[tuple[Fraction, Fraction]]:
    """Corner points of the three-case composite load, M = 1/K point included."""
    _check(N, K)
    th = m_threshold(N, K)
    pts = {Fraction(0): Fraction(N), Fraction(1, K): N * (1 - Fraction(1, K))}
    for t in range(1, K + 1):
        M = Fraction(t * N, K)
        pts[M] = r_co(N, K, M) if M < th.m_th else mns_coded_load(N, K, M)
    return sorted(pts.items())


def centralized_curve(N: int, K: int) -> TradeoffCurve:
    return TradeoffCurve.from_points("proposed", centralized_points(N, K))


def rco_curve(N: int, K: int) -> TradeoffCurve:
    """Envelope of R_co at every M = tN/K, without switching or the M = 1/K point."""
    _check(N, K)
    pts = [(Fraction(t * N, K), r_co(N, K, Fraction(t * N, K))) for t in range(K + 1)]
    return TradeoffCurve.from_points("rco", pts)


def mns_centralized(N: int, K: int) -> TradeoffCurve:
    """MNS corner points memory-shared with the M = 1/K point."""
    _check(N, K)
    pts = {Fraction(t * N, K): mns_load(N, K, Fraction(t * N, K)) for t in range(K + 1)}
    pts[Fraction(1, K)] = min(pts.get(Fraction(1, K), Fraction(N)), N * (1 - Fraction(1, K)))
    return TradeoffCurve.from_points("mns", sorted(pts.items()))


# -- decentralized ---------------------------------------------------------


def _q(N, M, exact):
    return as_fraction(M) / N if exact else float(as_fraction(M)) / N


def mns_decentralized(N: int, K: int, M, exact: bool = False):
    """K(1-q) min{(1/(Kq)) (1-(1-q)^K), N/K} with q = M/N."""
    _check(N, K)
    q = _q(N, M, exact)
    if q == 0:
        return Fraction(N) if exact else float(N)
    one = Fraction(1) if exact else 1.0
    return K * (one - q) * min((one - (one - q) ** K) / (K * q), one * N / K)


def level_two_step(N: int, K: int, level: int) -> int:
    """Two-step count at one knower-set level, in units of that level's subfile size."""
    return N * binom(K - 1, level) - (N - 1) * binom(K - 2, level - 1)


def level_mns(K: int, level: int) -> int:
    return binom(K, level + 1)


def r_d_sum(N: int, K: int, M, exact: bool = False):
    """Per-level sum: two-step up to floor(t_th), XOR delivery above."""
    _check(N, K)
    q = _q(N, M, exact)
    x = floor_t_threshold(N, K)
    total = Fraction(0) if exact else 0.0
    for i in range(K):
        w = q**i * (1 - q) ** (K - i)
        total += (level_two_step(N, K, i) if i <= x else level_mns(K, i)) * w
    return total


def binomial_cdf(x: int, y: int, q):
    """C(x, y, q) = sum_{i=0}^{x} C(y,i) q^i (1-q)^(y-i); empty sums are 0."""
    return sum((binom(y, i) * q**i * (1 - q) ** (y - i) for i in range(0, min(x, y) + 1)), 0 * q)


def r_d_closed(N: int, K: int, M, exact: bool = False):
    """Binomial-CDF form of the per-level sum."""
    _check(N, K)
    q = _q(N, M, exact)
    if q == 0:
        return Fraction(N) if exact else float(N)
    x = floor_t_threshold(N, K)
    return (
        N * (1 - q) * binomial_cdf(x, K - 1, q)
        - (N - 1) * q * (1 - q) * binomial_cdf(x - 1, K - 2, q)
        + (1 - q) / q * (1 - binomial_cdf(x + 1, K, q))
    )


def r_d(N: int, K: int, M, exact: bool = False):
    """Decentralized two-step load; both forms are evaluated and must agree."""
    s = r_d_sum(N, K, M, exact)
    c = r_d_closed(N, K, M, exact)
    if abs(float(s) - float(c)) > SUM_VS_CLOSED_TOL:
        raise ArithmeticError(f"sum {s} and closed form {c} disagree at N={N}, K={K}, M={M}")
    return s


# -- grids -----------------------------------------------------------------


def memory_grid(N: int, K: int, density: int = 20) -> list[Fraction]:
    """Uniform grid j N / density plus the corner points t N / K and 1/K."""
    pts = {Fraction(j * N, density) for j in range(density + 1)}
    pts |= {Fraction(t * N, K) for t in range(K + 1)}
    pts.add(Fraction(1, K))
    return sorted(pts)
