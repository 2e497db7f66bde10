"""
Problem instances, demand vectors and demand groups.

Files and users are 1-based throughout. File length F counts positions; in
simulation every position carries one field symbol, so "bits" in load
accounting are symbol positions and coded lengths stay exact.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .combinatorics import as_fraction, binom, format_fraction
from .errors import GranularityMismatch, InvalidRegime, MemoryOutOfRange

MODES = ("centralized", "decentralized")


@dataclass(frozen=True)
class ProblemInstance:
    N: int
    K: int
    M: Fraction
    F: int

    @property
    def q(self) -> Fraction:
        """Fraction of each file cached by each user."""
        return self.M / self.N

    @property
    def t(self) -> Fraction:
        return self.K * self.M / self.N

    @property
    def t_int(self) -> int | None:
        """t = KM/N when integral, otherwise None."""
        t = self.t
        return int(t) if t.denominator == 1 else None

    @property
    def subfile_size(self) -> int | None:
        """Centralized subfile length F / C(K, t), or None if not an integer."""
        t = self.t_int
        if t is None or self.F % binom(self.K, t):
            return None
        return self.F // binom(self.K, t)


def make_instance(N: int, K: int, M, F: int, mode: str | None = None) -> ProblemInstance:
    """Validate and build an instance.

    ``mode="centralized"`` additionally requires t = KM/N integral and F
    divisible by C(K, t).
    """
    M = as_fraction(M)
    if N < 1 or K < 1:
        raise InvalidRegime(f"N={N}, K={K} must be positive")
    if N >= K:
        raise InvalidRegime(f"need N < K, got N={N}, K={K}")
    if not 0 <= M <= N:
        raise MemoryOutOfRange(f"M={M} outside [0, {N}]")
    if F < 1:
        raise ValueError(f"F={F} must be >= 1")
    inst = ProblemInstance(N, K, M, int(F))
    if mode == "centralized":
        if inst.t_int is None:
            raise GranularityMismatch(f"t = KM/N = {inst.t} is not an integer")
        if inst.subfile_size is None:
            raise GranularityMismatch(f"F={F} is not a multiple of C({K},{inst.t_int})={binom(K, inst.t_int)}")
    elif mode not in (None, "decentralized"):
        raise ValueError(f"unknown mode {mode!r}")
    return inst


@dataclass(frozen=True)
class DemandVector:
    d: tuple[int, ...]
    N: int

    def __post_init__(self):
        if any(not 1 <= x <= self.N for x in self.d):
            raise ValueError(f"demands {self.d} must lie in [1:{self.N}]")

    @property
    def K(self) -> int:
        return len(self.d)

    @property
    def demanded_files(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.d)))

    @property
    def is_worst_case(self) -> bool:
        return len(set(self.d)) == self.N

    def groups(self) -> dict[int, tuple[int, ...]]:
        """Users requesting each demanded file; the groups partition [1:K]."""
        out: dict[int, list[int]] = {}
        for user, f in enumerate(self.d, start=1):
            out.setdefault(f, []).append(user)
        return {f: tuple(out[f]) for f in sorted(out)}

    def __getitem__(self, user: int) -> int:
        return self.d[user - 1]


def demands(d: Sequence[int], N: int, K: int | None = None) -> DemandVector:
    dv = DemandVector(tuple(int(x) for x in d), N)
    if K is not None and dv.K != K:
        raise ValueError(f"demand list has length {dv.K}, expected K={K}")
    return dv


def worst_case_demand(inst: ProblemInstance) -> DemandVector:
    """Contiguous, balanced demand blocks: (1,1,1,2,2) for N=2, K=5."""
    N, K = inst.N, inst.K
    if N > K:
        raise InvalidRegime("a surjective demand needs N <= K")
    base, extra = divmod(K, N)
    d = []
    for f in range(1, N + 1):
        d += [f] * (base + (f <= extra))
    return DemandVector(tuple(d), N)


def random_surjective_demand(N: int, K: int, rng: np.random.Generator) -> DemandVector:
    d = list(range(1, N + 1)) + list(rng.integers(1, N + 1, size=K - N))
    rng.shuffle(d)
    return DemandVector(tuple(int(x) for x in d), N)


def random_payloads(inst: ProblemInstance, rng: np.random.Generator, dtype=np.uint8) -> np.ndarray:
    """(N, F) array of random file contents; row i-1 holds file i."""
    hi = np.iinfo(dtype).max + 1
    return rng.integers(0, hi, size=(inst.N, inst.F), dtype=np.int64).astype(dtype)


def rng_for(seed: int, *labels) -> np.random.Generator:
    """Independent generator for a labelled stream derived from ``seed``."""
    key = tuple(zlib.crc32(str(x).encode()) for x in labels)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))


# -- JSON descriptor -------------------------------------------------------


def descriptor(inst: ProblemInstance, seed: int = 0, mode: str = "centralized") -> dict:
    return {"N": inst.N, "K": inst.K, "M": format_fraction(inst.M), "F": inst.F, "seed": seed, "mode": mode}


def from_descriptor(obj: dict) -> tuple[ProblemInstance, int, str]:
    mode = obj.get("mode", "centralized")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    inst = make_instance(int(obj["N"]), int(obj["K"]), as_fraction(obj["M"]), int(obj["F"]), mode=mode)
    return inst, int(obj.get("seed", 0)), mode
