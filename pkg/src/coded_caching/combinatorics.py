"""
Binomial counting, colexicographic subset ranking, exact rationals and the
lower convex envelope used for memory sharing.

Subsets are tuples of sorted 1-based members. The colex order on size-t
subsets of [1:K] is the order used everywhere else in the package for
subfile identifiers.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import EmptyInput, IdentityViolation

Rational = Fraction
Subset = tuple[int, ...]


def binom(n: int, k: int) -> int:
    """C(n, k), taken as 0 whenever k < 0 or k > n (including n < 0)."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def as_fraction(x, max_denominator: int = 10**6) -> Fraction:
    """Parse ``"4/5"``, ``"1.2"``, ints, floats or Fractions into a Fraction.

    Decimal strings are exact; floats are snapped to the nearest rational with
    denominator at most ``max_denominator``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(max_denominator)
    if isinstance(x, str):
        s = x.strip()
        f = Fraction(s)
        if "/" not in s and f.denominator > max_denominator:
            f = f.limit_denominator(max_denominator)
        return f
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# -- subsets ---------------------------------------------------------------


def colex_rank(subset: Sequence[int]) -> int:
    """Rank of a sorted subset of [1:K] among subsets of the same size."""
    return sum(binom(v - 1, i + 1) for i, v in enumerate(sorted(subset)))


def colex_unrank(rank: int, t: int, K: int) -> Subset:
    if not 0 <= rank < binom(K, t):
        raise ValueError(f"rank {rank} outside [0, C({K},{t}))")
    out = []
    v = K
    for i in range(t, 0, -1):
        # largest v with C(v-1, i) <= rank
        while binom(v - 1, i) > rank:
            v -= 1
        out.append(v)
        rank -= binom(v - 1, i)
        v -= 1
    return tuple(reversed(out))


def subsets(ground: Iterable[int], t: int) -> Iterator[Subset]:
    """Size-t subsets of ``ground`` in colex order."""
    items = sorted(ground)
    if t < 0 or t > len(items):
        return
    combos = list(combinations(items, t))
    combos.sort(key=lambda s: tuple(reversed(s)))
    yield from combos


def all_subsets(ground: Iterable[int]) -> Iterator[Subset]:
    items = sorted(ground)
    for t in range(len(items) + 1):
        yield from subsets(items, t)


def mask_to_subset(mask: int) -> Subset:
    out = []
    u = 1
    while mask:
        if mask & 1:
            out.append(u)
        mask >>= 1
        u += 1
    return tuple(out)


def subset_to_mask(subset: Iterable[int]) -> int:
    m = 0
    for u in subset:
        m |= 1 << (u - 1)
    return m


# -- counting identities ---------------------------------------------------


def pascal_check(g: int, t: int, j: int) -> bool:
    """C(g, t-j) - C(g-1, t-j-1) == C(g-1, t-j): coded rows per step-1 group."""
    if g < 1:
        raise ValueError("g must be >= 1")
    return binom(g, t - j) - binom(g - 1, t - j - 1) == binom(g - 1, t - j)


def _leftover_range(g_size: int, k: int, t: int) -> range:
    return range(max(0, t - g_size + 1), min(k - g_size, t) + 1)


def vandermonde_total(g_size: int, k: int, t: int) -> int:
    """Subfile-units in all step-1 codes of one file, summed over leftover sizes.

    Checks the sum against C(k-1, t) and raises IdentityViolation otherwise.
    """
    if not 1 <= g_size <= k:
        raise ValueError(f"need 1 <= g_size <= k, got g_size={g_size}, k={k}")
    total = sum(binom(g_size - 1, t - j) * binom(k - g_size, j) for j in _leftover_range(g_size, k, t))
    if total != binom(k - 1, t):
        raise IdentityViolation(f"sum {total} != C({k - 1},{t})")
    return total


def vandermonde_known(g_size: int, k: int, t: int) -> int:
    """Step-1 subfile-units of one file that a fixed non-requesting user can rebuild."""
    if not 1 <= g_size <= k - 1:
        raise ValueError(f"need 1 <= g_size <= k-1, got g_size={g_size}, k={k}")
    total = sum(
        binom(g_size - 1, t - j) * binom(k - g_size - 1, j - 1)
        for j in _leftover_range(g_size, k, t)
        if j >= 1
    )
    if total != binom(k - 2, t - 1):
        raise IdentityViolation(f"sum {total} != C({k - 2},{t - 1})")
    return total


# -- convex envelope -------------------------------------------------------


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function through ``vertices`` (sorted by x)."""

    vertices: tuple[tuple[Fraction, Fraction], ...]

    @property
    def xmin(self) -> Fraction:
        return self.vertices[0][0]

    @property
    def xmax(self) -> Fraction:
        return self.vertices[-1][0]

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        if not self.xmin <= x <= self.xmax:
            raise ValueError(f"{x} outside [{self.xmin}, {self.xmax}]")
        xs = [v[0] for v in self.vertices]
        i = bisect.bisect_left(xs, x)
        if xs[i] == x:
            return self.vertices[i][1]
        (x0, y0), (x1, y1) = self.vertices[i - 1], self.vertices[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def segment(self, x) -> int:
        """Index i of the segment [vertices[i], vertices[i+1]] containing x."""
        x = as_fraction(x)
        xs = [v[0] for v in self.vertices]
        i = bisect.bisect_right(xs, x) - 1
        return max(0, min(i, len(xs) - 2))

    def slopes(self) -> list[Fraction]:
        v = self.vertices
        return [(v[i + 1][1] - v[i][1]) / (v[i + 1][0] - v[i][0]) for i in range(len(v) - 1)]


def lower_convex_envelope(points: Iterable[tuple]) -> PiecewiseLinear:
    """Lower boundary of the convex hull of ``points``, in exact arithmetic.

    Collinear interior points are dropped from the vertex list; evaluation on
    them is unaffected.
    """
    pts = sorted((as_fraction(x), as_fraction(y)) for x, y in points)
    if not pts:
        raise EmptyInput("no points")
    for a, b in zip(pts, pts[1:]):
        if a[0] == b[0]:
            raise ValueError(f"duplicate abscissa {a[0]}")
    hull: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return PiecewiseLinear(tuple(hull))
