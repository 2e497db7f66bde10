"""
Delivery schemes and per-user decoders.

Everything is built on one primitive: a set of *items* (symbol vectors of
possibly different lengths) and, for every receiver, the subset of items it
already holds. Items are aligned at position 0 and cut into segments at every
distinct item length; inside a segment the set of present items is fixed, and
the encoder sends ``present - min_u known_u`` random linear combinations of
the present items, one coefficient per item applied to every position of the
segment. Any receiver then has at least as many equations as unknowns. With
equal item lengths there is a single segment and this is the plain
"m - d random combinations" group code.

The proposed two-step delivery applies the primitive twice per knower-set
level: once per group of subfiles (step 1) and once over all step-1 coded
rows of the level (step 2), where a user counts as holding every step-1 row
it can rebuild from its own cache. MNS delivery applies it with all-one
coefficients to each (level+1)-subset of users, i.e. a zero-padded XOR.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Hashable, Mapping

import numpy as np

from .combinatorics import Subset, binom, subsets
from .errors import DecodeFailure, RankDeficient
from .gf import GF
from .model import DemandVector, ProblemInstance, rng_for
from .placement import CacheState, PlacementRecord

RETRY_BUDGET = 8

Key = Hashable


# -- segment primitive -----------------------------------------------------


@dataclass(frozen=True)
class Segment:
    start: int
    stop: int
    present: tuple
    rows: int

    @property
    def length(self) -> int:
        return self.stop - self.start


def plan_segments(lengths: Mapping[Key, int], knowledge: Mapping[int, set]) -> list[Segment]:
    """Cut aligned items into segments and count the combinations each needs.

    ``knowledge`` maps every receiver that must decode to the item keys it
    already holds.
    """
    keys = [k for k, n in lengths.items() if n > 0]
    cuts = sorted({0, *(lengths[k] for k in keys)})
    segments = []
    for a, b in zip(cuts, cuts[1:]):
        present = tuple(k for k in keys if lengths[k] > a)
        known = min((sum(k in held for k in present) for held in knowledge.values()), default=0)
        segments.append(Segment(a, b, present, len(present) - known))
    return segments


@dataclass
class CodedBlock:
    """Coded rows for one segment: ``payload = coeffs @ items[present][start:stop]``."""

    segment: Segment
    coeffs: np.ndarray
    payload: np.ndarray | None = None
    tag: tuple = ()

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def bits(self) -> int:
        return self.rows * self.segment.length

    def header(self) -> "CodedBlock":
        return replace(self, payload=None)


def encode_blocks(
    segments: list[Segment],
    items: Mapping[Key, np.ndarray],
    gf: GF,
    rng: np.random.Generator | None = None,
    xor: bool = False,
    tag: tuple = (),
) -> list[CodedBlock]:
    blocks = []
    for seg in segments:
        if seg.rows == 0:
            continue
        n = len(seg.present)
        if xor:
            if seg.rows != 1:
                raise ValueError("an XOR block carries exactly one row")
            coeffs = np.ones((1, n), dtype=gf.dtype)
        else:
            coeffs = gf.random((seg.rows, n), rng)
        data = np.stack([items[k][seg.start:seg.stop] for k in seg.present])
        blocks.append(CodedBlock(seg, coeffs, gf.matmul(coeffs, data), tag))
    return blocks


def reencode(blocks: list[CodedBlock], items: Mapping[Key, np.ndarray], gf: GF) -> list[np.ndarray]:
    """Recompute block payloads from locally held items (receiver side)."""
    out = []
    for blk in blocks:
        seg = blk.segment
        data = np.stack([items[k][seg.start:seg.stop] for k in seg.present])
        out.append(gf.matmul(blk.coeffs, data))
    return out


def decode_blocks(blocks: list[CodedBlock], known: Mapping[Key, np.ndarray], gf: GF) -> dict[Key, np.ndarray]:
    """Recover every item that appears in ``blocks`` but not in ``known``."""
    lengths: dict[Key, int] = {}
    for blk in blocks:
        for k in blk.segment.present:
            if k not in known:
                lengths[k] = max(lengths.get(k, 0), blk.segment.stop)
    out = {k: np.zeros(n, dtype=gf.dtype) for k, n in lengths.items()}
    for blk in blocks:
        seg = blk.segment
        unk = [j for j, k in enumerate(seg.present) if k not in known]
        if not unk:
            continue
        kn = [j for j, k in enumerate(seg.present) if k in known]
        rhs = blk.payload.copy()
        if kn:
            data = np.stack([known[seg.present[j]][seg.start:seg.stop] for j in kn])
            rhs ^= gf.matmul(blk.coeffs[:, kn], data)
        x = gf.solve(blk.coeffs[:, unk], rhs)
        for r, j in enumerate(unk):
            out[seg.present[j]][seg.start:seg.stop] = x[r]
    return out


def _segments_bits(segments: list[Segment]) -> int:
    return sum(s.rows * s.length for s in segments)


# -- groups ----------------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    """Subfiles of one file at one level sharing the same knowers outside its demanders."""

    level: int
    file: int
    leftover: Subset
    demanders: tuple[int, ...]
    members: tuple[Subset, ...]
    sizes: tuple[int, ...]

    def key(self, W: Subset) -> tuple[int, Subset]:
        return (self.file, W)

    def known_counts(self) -> dict[int, int]:
        return {u: sum(u in W for W in self.members) for u in self.demanders}

    def knowledge(self) -> dict[int, set]:
        return {u: {self.key(W) for W in self.members if u in W} for u in self.demanders}

    @property
    def zero_transmission(self) -> bool:
        return len(self.leftover) == self.level - len(self.demanders)

    def plan(self) -> list[Segment]:
        lengths = {self.key(W): n for W, n in zip(self.members, self.sizes)}
        return plan_segments(lengths, self.knowledge())

    @property
    def coded_bits(self) -> int:
        return _segments_bits(self.plan())


@dataclass
class GroupCode:
    spec: GroupSpec
    blocks: list[CodedBlock]

    @property
    def bits(self) -> int:
        return sum(b.bits for b in self.blocks)

    @property
    def rows(self) -> int:
        return sum(b.rows for b in self.blocks)

    def row_keys(self, b: int) -> list[tuple]:
        s = self.spec
        return [("c", s.level, s.file, s.leftover, b, r) for r in range(self.blocks[b].rows)]

    def header(self) -> "GroupCode":
        return GroupCode(self.spec, [b.header() for b in self.blocks])


def build_groups(placement: PlacementRecord, demands: DemandVector, level: int | None = None) -> list[GroupSpec]:
    """Partition the level-``level`` subfiles of every demanded file into groups.

    ``level`` defaults to t for centralized placements. Files nobody requests
    are skipped, which is the reduction to the requested-file sub-instance.
    """
    if level is None:
        level = placement.instance.t_int
        if level is None:
            raise ValueError("level is required for non-integral t")
    out = []
    for i, G in demands.groups().items():
        Gset = set(G)
        by_leftover: dict[Subset, list[Subset]] = {}
        for W in placement.level(i, level):
            J = tuple(u for u in W if u not in Gset)
            by_leftover.setdefault(J, []).append(W)
        for J in sorted(by_leftover, key=lambda s: (len(s), s[::-1])):
            members = tuple(sorted(by_leftover[J], key=lambda s: s[::-1]))
            sizes = tuple(placement.size(i, W) for W in members)
            out.append(GroupSpec(level, i, J, G, members, sizes))
    return out


def _subfile_items(placement: PlacementRecord, payloads: np.ndarray, spec: GroupSpec) -> dict:
    return {spec.key(W): payloads[spec.file - 1, placement.positions(spec.file, W)] for W in spec.members}


# -- messages --------------------------------------------------------------


@dataclass
class LevelDelivery:
    level: int
    scheme: str
    blocks: list[CodedBlock]
    step1: list[GroupCode] = field(default_factory=list)
    step1_known: dict[int, int] = field(default_factory=dict)

    @property
    def bits(self) -> int:
        return sum(b.bits for b in self.blocks)

    @property
    def step1_bits(self) -> int:
        return sum(g.bits for g in self.step1)


@dataclass
class BroadcastMessage:
    """Everything the server broadcasts.

    Only ``blocks`` payloads count toward the load; coefficient matrices,
    step-1 headers and the subfile layout are side information.
    """

    scheme: str
    F: int
    demands: DemandVector
    levels: list[LevelDelivery]
    layout: list[dict[Subset, np.ndarray]]
    gf: GF
    seed: int

    @property
    def transmitted_bits(self) -> int:
        return sum(lv.bits for lv in self.levels)

    @property
    def load(self) -> Fraction:
        return Fraction(self.transmitted_bits, self.F)

    @property
    def step1_bits(self) -> int:
        return sum(lv.step1_bits for lv in self.levels)

    @property
    def rows(self) -> int:
        return sum(b.rows for lv in self.levels for b in lv.blocks)

    def transcript(self) -> list[dict]:
        out = []
        for lv in self.levels:
            for blk in lv.blocks:
                src = "step2" if lv.scheme == "two-step" else "mns"
                for r in range(blk.rows):
                    digest = hashlib.sha256(blk.payload[r].tobytes()).hexdigest()[:16]
                    out.append(
                        {
                            "level": lv.level,
                            "source": src,
                            "tag": [list(x) if isinstance(x, tuple) else x for x in blk.tag],
                            "segment": [blk.segment.start, blk.segment.stop],
                            "coefficients": blk.coeffs[r].tolist(),
                            "payload_sha256": digest,
                        }
                    )
        return out


# -- two-step delivery -----------------------------------------------------


def encode_step1(
    groups: list[GroupSpec], placement: PlacementRecord, payloads: np.ndarray, gf: GF, rng: np.random.Generator
) -> list[GroupCode]:
    """Random linear group codes; zero-transmission groups produce no rows."""
    inventory = []
    for spec in groups:
        items = _subfile_items(placement, payloads, spec)
        blocks = encode_blocks(spec.plan(), items, gf, rng, tag=("step1", spec.file, spec.leftover))
        inventory.append(GroupCode(spec, blocks))
    return inventory


def step1_rows(inventory: list[GroupCode]) -> dict[tuple, np.ndarray]:
    rows = {}
    for gc in inventory:
        for b, blk in enumerate(gc.blocks):
            for key, row in zip(gc.row_keys(b), blk.payload):
                rows[key] = row
    return rows


def step2_knowledge(inventory: list[GroupCode], K: int) -> dict[int, set]:
    """Step-1 rows each user rebuilds locally: every row of C_{i,J} with the user in J."""
    known: dict[int, set] = {u: set() for u in range(1, K + 1)}
    for gc in inventory:
        keys = [k for b in range(len(gc.blocks)) for k in gc.row_keys(b)]
        for u in gc.spec.leftover:
            known[u].update(keys)
    return known


def known_step1_bits(inventory: list[GroupCode], K: int) -> dict[int, int]:
    return {u: sum(gc.bits for gc in inventory if u in gc.spec.leftover) for u in range(1, K + 1)}


def _step2_plan(inventory: list[GroupCode], K: int) -> list[Segment]:
    lengths = {}
    for gc in inventory:
        for b, blk in enumerate(gc.blocks):
            for key in gc.row_keys(b):
                lengths[key] = blk.segment.length
    return plan_segments(lengths, step2_knowledge(inventory, K))


def _two_step_level(placement, demands, level, payloads, gf, rng) -> LevelDelivery:
    K = placement.instance.K
    inventory = encode_step1(build_groups(placement, demands, level), placement, payloads, gf, rng)
    blocks = encode_blocks(_step2_plan(inventory, K), step1_rows(inventory), gf, rng, tag=("step2", level))
    return LevelDelivery(
        level, "two-step", blocks, [gc.header() for gc in inventory], known_step1_bits(inventory, K)
    )


def encode_step2(
    inventory: list[GroupCode],
    placement: PlacementRecord,
    demands: DemandVector,
    seed: int,
    gf: GF | None = None,
) -> BroadcastMessage:
    """Random combinations over every step-1 row, minus what each user rebuilds."""
    gf = gf or GF(8)
    K = placement.instance.K
    level = inventory[0].spec.level if inventory else placement.instance.t_int
    rng = rng_for(seed, "step2", level)
    blocks = encode_blocks(_step2_plan(inventory, K), step1_rows(inventory), gf, rng, tag=("step2", level))
    lv = LevelDelivery(level, "two-step", blocks, [gc.header() for gc in inventory], known_step1_bits(inventory, K))
    return BroadcastMessage("proposed", placement.instance.F, demands, [lv], placement.classes, gf, seed)


def deliver_proposed(
    placement: PlacementRecord, demands: DemandVector, payloads: np.ndarray, seed: int, gf: GF | None = None
) -> BroadcastMessage:
    """Centralized two-step delivery at level t."""
    gf = gf or GF(8)
    rng = rng_for(seed, "delivery")
    lv = _two_step_level(placement, demands, placement.instance.t_int, payloads, gf, rng)
    return BroadcastMessage("proposed", placement.instance.F, demands, [lv], placement.classes, gf, seed)


# -- MNS delivery ----------------------------------------------------------


def _mns_items(placement, demands, S) -> tuple[dict, dict]:
    lengths, knowledge = {}, {}
    for k in S:
        key = (demands[k], tuple(u for u in S if u != k))
        lengths[key] = placement.size(*key)
        knowledge[k] = set()
    for k in S:
        own = (demands[k], tuple(u for u in S if u != k))
        knowledge[k] = {key for key in lengths if key != own}
    return lengths, knowledge


def _mns_level(placement, demands, level, payloads, gf) -> LevelDelivery:
    blocks = []
    for S in subsets(range(1, placement.instance.K + 1), level + 1):
        lengths, knowledge = _mns_items(placement, demands, S)
        items = {k: payloads[k[0] - 1, placement.positions(*k)] for k in lengths}
        blocks += encode_blocks(plan_segments(lengths, knowledge), items, gf, xor=True, tag=("mns", S))
    return LevelDelivery(level, "mns", blocks)


def _mns_level_bits(placement, demands, level) -> int:
    total = 0
    for S in subsets(range(1, placement.instance.K + 1), level + 1):
        lengths, _ = _mns_items(placement, demands, S)
        total += max(lengths.values())
    return total


def mns_deliver(
    placement: PlacementRecord, demands: DemandVector, payloads: np.ndarray, gf: GF | None = None
) -> BroadcastMessage:
    """XOR of F_{d_k, S minus k} over k in S, for every (t+1)-subset S."""
    gf = gf or GF(8)
    lv = _mns_level(placement, demands, placement.instance.t_int, payloads, gf)
    return BroadcastMessage("mns", placement.instance.F, demands, [lv], placement.classes, gf, 0)


# -- decentralized ---------------------------------------------------------


def level_costs(placement: PlacementRecord, demands: DemandVector, level: int) -> dict[str, int]:
    """Transmitted bits of the two-step and MNS deliveries for one level."""
    K = placement.instance.K
    groups = build_groups(placement, demands, level)
    lengths = {}
    knowledge: dict[int, set] = {u: set() for u in range(1, K + 1)}
    for g in groups:
        for b, seg in enumerate(s for s in g.plan() if s.rows):
            for r in range(seg.rows):
                key = (g.file, g.leftover, b, r)
                lengths[key] = seg.length
                for u in g.leftover:
                    knowledge[u].add(key)
    two = _segments_bits(plan_segments(lengths, knowledge))
    return {"two-step": two, "mns": _mns_level_bits(placement, demands, level)}


def deliver_decentralized(
    placement: PlacementRecord,
    demands: DemandVector,
    payloads: np.ndarray,
    seed: int,
    gf: GF | None = None,
) -> BroadcastMessage:
    """Per knower-set level, the cheaper of two-step and MNS delivery on the realized sizes."""
    gf = gf or GF(8)
    rng = rng_for(seed, "delivery")
    levels = []
    for level in range(placement.instance.K):
        cost = level_costs(placement, demands, level)
        if cost["two-step"] == 0 and cost["mns"] == 0:
            continue
        if cost["two-step"] <= cost["mns"]:
            levels.append(_two_step_level(placement, demands, level, payloads, gf, rng))
        else:
            levels.append(_mns_level(placement, demands, level, payloads, gf))
    return BroadcastMessage("decentralized", placement.instance.F, demands, levels, placement.classes, gf, seed)


# -- decoding --------------------------------------------------------------


def _decode_two_step(user: int, lv: LevelDelivery, have: dict, gf: GF, want: int) -> None:
    known_rows = {}
    for gc in lv.step1:
        if user in gc.spec.leftover:
            for b, payload in enumerate(reencode(gc.blocks, have, gf)):
                known_rows.update(zip(gc.row_keys(b), payload))
    rows = {**known_rows, **decode_blocks(lv.blocks, known_rows, gf)}
    for gc in lv.step1:
        if gc.spec.file != want or not gc.blocks:
            continue
        filled = []
        for b, blk in enumerate(gc.blocks):
            filled.append(replace(blk, payload=np.stack([rows[k] for k in gc.row_keys(b)])))
        have.update(decode_blocks(filled, have, gf))


def decode(user: int, message: BroadcastMessage, cache: CacheState, demands: DemandVector | None = None) -> np.ndarray:
    """Reconstruct the file requested by ``user`` from the broadcast and its cache.

    Raises RankDeficient when a random draw left some system singular.
    """
    demands = demands or message.demands
    want = demands[user]
    gf = message.gf
    have = dict(cache.items)
    for lv in message.levels:
        if lv.scheme == "two-step":
            _decode_two_step(user, lv, have, gf, want)
        else:
            blocks = [b for b in lv.blocks if user in b.tag[1]]
            have.update(decode_blocks(blocks, have, gf))
    out = np.zeros(message.F, dtype=gf.dtype)
    for W, pos in message.layout[want - 1].items():
        if len(pos) == 0:
            continue
        if (want, W) not in have:
            raise DecodeFailure(f"user {user} is missing subfile {want},{W}")
        out[pos] = have[(want, W)]
    return out


# -- closed-form counts used by tests and reports ----------------------------


def two_step_rows(N: int, K: int, t: int) -> int:
    """Step-2 row count in subfile units: N C(K-1,t) - (N-1) C(K-2,t-1)."""
    return N * binom(K - 1, t) - (N - 1) * binom(K - 2, t - 1)


def expected_bits(inst: ProblemInstance, scheme: str, n_requested: int | None = None) -> int:
    """Centralized transmitted bits predicted by counting, for a check against simulation."""
    t = inst.t_int
    L = inst.subfile_size
    n = inst.N if n_requested is None else n_requested
    if scheme == "mns":
        return binom(inst.K, t + 1) * L
    return two_step_rows(n, inst.K, t) * L


def verify_all_users(message: BroadcastMessage, placement: PlacementRecord, payloads: np.ndarray) -> dict[int, bool]:
    """Decode at every user and compare bit-exactly with the requested file."""
    ok = {}
    for u in range(1, placement.instance.K + 1):
        got = decode(u, message, placement.cache(u, payloads))
        ok[u] = bool(np.array_equal(got, payloads[message.demands[u] - 1]))
    return ok


def deliver_with_retry(build, placement, payloads, seed: int, budget: int = RETRY_BUDGET):
    """Run ``build(seed)`` and decode at every user, retrying with seed+1 on RankDeficient.

    Returns (message, per-user success, attempts used).
    """
    last = None
    for attempt in range(budget + 1):
        msg = build(seed + attempt)
        try:
            return msg, verify_all_users(msg, placement, payloads), attempt + 1
        except RankDeficient as exc:
            last = exc
    raise DecodeFailure(f"rank deficient after {budget + 1} draws: {last}")
