"""
Cache placement.

Both placements are described by knower-set classes: for file i and user set
W, ``classes[i][W]`` is the sorted array of positions of file i cached by
exactly the users in W. Centralized placement uses only |W| = t with equal
contiguous ranges in colex order of W; decentralized placement derives the
classes from independent per-user random samples and stores only the
nonempty ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .combinatorics import Subset, binom, mask_to_subset, subsets
from .errors import GranularityMismatch
from .model import ProblemInstance, rng_for

MAX_DECENTRALIZED_USERS = 20

SubfileKey = tuple[int, Subset]


@dataclass
class CacheState:
    """Contents Z_j of one user's cache, keyed by (file, knower set)."""

    user: int
    items: dict[SubfileKey, np.ndarray] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return sum(len(v) for v in self.items.values())

    def __contains__(self, key) -> bool:
        return key in self.items


@dataclass
class PlacementRecord:
    mode: str
    instance: ProblemInstance
    classes: list[dict[Subset, np.ndarray]]
    seed: int | None = None

    def positions(self, file: int, W: Subset) -> np.ndarray:
        return self.classes[file - 1].get(W, np.empty(0, dtype=np.int64))

    def size(self, file: int, W: Subset) -> int:
        return len(self.positions(file, W))

    def knower_sets(self, file: int) -> list[Subset]:
        return list(self.classes[file - 1])

    def level(self, file: int, level: int) -> list[Subset]:
        """Nonempty knower sets of ``file`` with exactly ``level`` members."""
        return [W for W, pos in self.classes[file - 1].items() if len(W) == level and len(pos)]

    def cached_keys(self, user: int) -> list[SubfileKey]:
        return [
            (i + 1, W)
            for i, cls in enumerate(self.classes)
            for W, pos in cls.items()
            if user in W and len(pos)
        ]

    def cache(self, user: int, payloads: np.ndarray) -> CacheState:
        """Materialise Z_user from the file payloads (row i-1 is file i)."""
        items = {(i, W): payloads[i - 1, self.positions(i, W)] for i, W in self.cached_keys(user)}
        return CacheState(user, items)

    def cache_bits(self, user: int) -> int:
        return sum(self.size(i, W) for i, W in self.cached_keys(user))

    def transcript(self) -> list[dict]:
        """Per user, the list of cached (file, knower set, size) entries."""
        out = []
        for u in range(1, self.instance.K + 1):
            entries = [{"file": i, "W": list(W), "size": self.size(i, W)} for i, W in self.cached_keys(u)]
            out.append({"user": u, "items": entries})
        return out


def place_centralized(inst: ProblemInstance) -> PlacementRecord:
    """Split every file into C(K,t) equal subfiles; user j caches F_{i,W} iff j in W."""
    t = inst.t_int
    if t is None:
        raise GranularityMismatch(f"t = KM/N = {inst.t} is not an integer")
    size = inst.subfile_size
    if size is None:
        raise GranularityMismatch(f"F={inst.F} is not a multiple of C({inst.K},{t})")
    layout = {}
    for r, W in enumerate(subsets(range(1, inst.K + 1), t)):
        layout[W] = np.arange(r * size, (r + 1) * size, dtype=np.int64)
    assert len(layout) == binom(inst.K, t)
    return PlacementRecord("centralized", inst, [dict(layout) for _ in range(inst.N)])


def place_decentralized(inst: ProblemInstance, seed: int) -> PlacementRecord:
    """Each user caches exactly round(MF/N) uniformly chosen positions of each file."""
    K, F = inst.K, inst.F
    if K > MAX_DECENTRALIZED_USERS:
        raise ValueError(f"decentralized simulation supports K <= {MAX_DECENTRALIZED_USERS}")
    per_file = round(inst.q * F)
    rng = rng_for(seed, "placement")
    classes = []
    for _ in range(inst.N):
        masks = np.zeros(F, dtype=np.int64)
        for u in range(K):
            idx = rng.choice(F, size=per_file, replace=False)
            masks[idx] |= 1 << u
        order = np.argsort(masks, kind="stable")
        values, starts = np.unique(masks[order], return_index=True)
        bounds = list(starts[1:]) + [F]
        cls = {mask_to_subset(int(v)): order[s:e] for v, s, e in zip(values, starts, bounds)}
        classes.append(dict(sorted(cls.items(), key=lambda kv: (len(kv[0]), kv[0][::-1]))))
    return PlacementRecord("decentralized", inst, classes, seed)
