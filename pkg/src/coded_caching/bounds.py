"""
Lower bound on the worst-case load under uncoded placement.

With x_i the total length of subfiles known by exactly i users, the bound is
the minimum of sum_i c_i x_i subject to sum_i x_i = N, sum_i i x_i = KM and
x >= 0, where c_i = [C(K-1,i) + ... + C(K-N,i)] / (N C(K,i)). Two equality
constraints mean every vertex has at most two nonzero coordinates, so the LP
is solved exactly by enumerating pairs. For N = 2 the bound has a closed
piecewise-linear form whose pieces coincide with the envelope of R_co.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .analytics import r_co, rco_curve
from .combinatorics import as_fraction, binom, format_fraction
from .errors import CertificationFailed, Infeasible


@dataclass(frozen=True)
class BoundProgram:
    N: int
    K: int
    coeffs: tuple[Fraction, ...]

    @classmethod
    def build(cls, N: int, K: int) -> "BoundProgram":
        if not 1 <= N < K:
            raise ValueError(f"need 1 <= N < K, got N={N}, K={K}")
        c = tuple(
            Fraction(sum(binom(K - j, i) for j in range(1, N + 1)), N * binom(K, i)) for i in range(K + 1)
        )
        return cls(N, K, c)

    def objective(self, x) -> Fraction:
        return sum((c * xi for c, xi in zip(self.coeffs, x)), Fraction(0))

    def feasible(self, x, M) -> bool:
        M = as_fraction(M)
        return (
            all(xi >= 0 for xi in x)
            and sum(x) == self.N
            and sum(i * xi for i, xi in enumerate(x)) == self.K * M
        )


@dataclass(frozen=True)
class BoundCertificate:
    M: Fraction
    value: Fraction
    witness: tuple[Fraction, ...]
    segment: int | None = None

    def to_dict(self) -> dict:
        return {
            "M": format_fraction(self.M),
            "bound": format_fraction(self.value),
            "witness": [format_fraction(x) for x in self.witness],
            "segment": self.segment,
        }


def lp_bound(N: int, K: int, M) -> BoundCertificate:
    """Exact LP minimum by enumerating basic feasible solutions."""
    M = as_fraction(M)
    if not 0 <= M <= N:
        raise Infeasible(f"M={M} outside [0, {N}]")
    prog = BoundProgram.build(N, K)
    target = K * M  # sum i x_i
    best = None
    for i, j in combinations(range(K + 1), 2):
        # x_i + x_j = N, i x_i + j x_j = KM
        xj = (target - i * N) / (j - i)
        xi = N - xj
        if xi < 0 or xj < 0:
            continue
        val = prog.coeffs[i] * xi + prog.coeffs[j] * xj
        if best is None or val < best[0]:
            x = [Fraction(0)] * (K + 1)
            x[i], x[j] = xi, xj
            best = (val, tuple(x))
    if best is None:
        raise Infeasible(f"no vertex for N={N}, K={K}, M={M}")
    seg = n2_segment(K, M) if N == 2 else None
    return BoundCertificate(M, best[0], best[1], seg)


# -- N = 2 closed form -----------------------------------------------------


def n2_segment_coeffs(K: int, q: int) -> tuple[Fraction, Fraction]:
    """Intercept and slope of the q-th linear piece of the N=2 bound."""
    return (
        Fraction(2 * K * K - 2 * K - q * q + q, K * (K - 1)),
        Fraction(2 * q - 3 * K + 1, 2 * (K - 1)),
    )


def n2_segment(K: int, M) -> int:
    """q with 2(q-1)/K <= M <= 2q/K (smallest such q at breakpoints)."""
    M = as_fraction(M)
    for q in range(1, K + 1):
        if M <= Fraction(2 * q, K):
            return q
    return K


def closed_form_bound_n2(K: int, M) -> Fraction:
    """max over q of the linear pieces; each piece alone is a valid lower bound."""
    if K <= 2:
        raise ValueError("need K > 2")
    M = as_fraction(M)
    if not 0 <= M <= 2:
        raise Infeasible(f"M={M} outside [0, 2]")
    return max(a + b * M for a, b in (n2_segment_coeffs(K, q) for q in range(1, K + 1)))


def elimination_residuals(K: int, q: int) -> tuple[Fraction, ...]:
    """Coefficients left on x_i after subtracting the q-th piece from the N=2 objective.

    The objective equals a_q + b_q M + sum_i r_i x_i on the feasible set; the
    bound is valid because every r_i is nonnegative.
    """
    prog = BoundProgram.build(2, K)
    a, b = n2_segment_coeffs(K, q)
    return tuple(c - a / 2 - b * i / K for i, c in enumerate(prog.coeffs))


# -- certification ---------------------------------------------------------


@dataclass
class OptimalityReport:
    N: int
    K: int
    points: list[dict] = field(default_factory=list)
    certified: bool | None = None

    def to_dict(self) -> dict:
        return {"K": self.K, "N": self.N, "points": self.points, "certified": self.certified}


def certification_grid(K: int, N: int = 2, intermediate: int = 50) -> list[Fraction]:
    pts = {Fraction(t * N, K) for t in range(K + 1)}
    pts |= {Fraction(j * N, intermediate + 1) for j in range(1, intermediate + 1)}
    return sorted(pts)


def certify_optimality_n2(K: int, intermediate: int = 50) -> OptimalityReport:
    """Check envelope(R_co) == LP bound == closed form at corner and intermediate points."""
    if K <= 2:
        raise ValueError("need K > 2")
    env = rco_curve(2, K)
    report = OptimalityReport(2, K)
    for M in certification_grid(K, 2, intermediate):
        ach = env(M)
        cert = lp_bound(2, K, M)
        closed = closed_form_bound_n2(K, M)
        point = {
            "M": format_fraction(M),
            "achievable": format_fraction(ach),
            "bound": format_fraction(cert.value),
            "closed_form": format_fraction(closed),
            "witness": [format_fraction(x) for x in cert.witness],
            "segment": cert.segment,
        }
        report.points.append(point)
        if not ach == cert.value == closed:
            report.certified = False
            raise CertificationFailed(K, point)
    report.certified = True
    return report


def bound_report(N: int, K: int, intermediate: int = 50) -> OptimalityReport:
    """Bound-only report for any N < K: achievable envelope and LP bound, no equality claim."""
    env = rco_curve(N, K)
    report = OptimalityReport(N, K)
    for M in certification_grid(K, N, intermediate):
        cert = lp_bound(N, K, M)
        report.points.append(
            {
                "M": format_fraction(M),
                "achievable": format_fraction(env(M)),
                "bound": format_fraction(cert.value),
                "witness": [format_fraction(x) for x in cert.witness],
            }
        )
    return report


def corner_gap(N: int, K: int, t: int) -> Fraction:
    """R_co minus the LP bound at M = tN/K."""
    M = Fraction(t * N, K)
    return r_co(N, K, M) - lp_bound(N, K, M).value
