"""Private-pair selection over a finished decomposition.

Cover counts are always taken against the full original sets of a stage's
members, never against remainders.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from . import _bits
from .decomposition import Decomposition
from .errors import NoGarbageVertex, NoPrivatePair, ReplacementBrokePrivacy
from .report import FAIL, PASS, SKIPPED, Check, verdict


@dataclass(frozen=True, order=True)
class Pair:
    lo: int
    hi: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"pair needs lo < hi, got ({self.lo}, {self.hi})")

    @classmethod
    def of(cls, a: int, b: int) -> "Pair":
        return cls(min(a, b), max(a, b))

    @property
    def mask(self) -> int:
        return (1 << self.lo) | (1 << self.hi)

    def labels(self) -> list[int]:
        return [self.lo + 1, self.hi + 1]


@dataclass(frozen=True)
class PrivatePair:
    owner: int
    time: int
    anchor: int
    non_anchor: int
    # non-anchor straight out of the private-pair search, before replacements
    selected_non_anchor: int
    rules: tuple[str, ...] = ()

    @property
    def pair(self) -> Pair:
        return Pair.of(self.anchor, self.non_anchor)

    def to_json(self) -> dict:
        return {
            "owner": self.owner + 1,
            "time": self.time,
            "pair": self.pair.labels(),
            "anchor": self.anchor + 1,
            "non_anchor": self.non_anchor + 1,
            "selected_non_anchor": self.selected_non_anchor + 1,
            "rules": list(self.rules),
        }


@dataclass(frozen=True)
class PairLedger:
    pairs: dict[tuple[int, int], PrivatePair]

    def at_time(self, j: int) -> list[PrivatePair]:
        return [p for p in self.ordered() if p.time == j]

    def of_owner(self, i: int) -> list[PrivatePair]:
        return [self.pairs[key] for key in sorted(self.pairs) if key[0] == i]

    def anchors(self, i: int, upto: int) -> int:
        mask = 0
        for p in self.of_owner(i):
            if p.time <= upto:
                mask |= 1 << p.anchor
        return mask

    def ordered(self) -> list[PrivatePair]:
        """Chronological order: by time, then owner."""
        return [self.pairs[key] for key in sorted(self.pairs, key=lambda k: (k[1], k[0]))]

    def to_json(self) -> list[dict]:
        return [p.to_json() for p in self.ordered()]


def cover_count(p: Pair | int, stage_sets: Iterable[int]) -> int:
    mask = p.mask if isinstance(p, Pair) else p
    return sum(1 for s in stage_sets if s & mask == mask)


def smallest_private_pair(owner_set: int, stage_sets: Sequence[int], y: int = 0) -> Pair | None:
    """Lexicographically smallest pair of ``owner_set - y`` lying in exactly one stage set."""
    pool = list(_bits.bits(owner_set & ~y))
    for a, b in combinations(pool, 2):
        if cover_count((1 << a) | (1 << b), stage_sets) == 1:
            return Pair(a, b)
    return None


def find_private_pair(d: Decomposition, i: int, j: int, y: int = 0) -> Pair:
    st = d.stages[j]
    if i not in st.members:
        raise ValueError(f"set {i + 1} is not a member of stage {j}")
    if y & ~d.sets[i]:
        raise ValueError("Y must be a subset of the owner set")
    pair = smallest_private_pair(d.sets[i], d.stage_sets(j), y)
    if pair is None:
        raise NoPrivatePair(
            f"set {i + 1} has no single-covered pair at stage {j}",
            {"set": i + 1, "stage": j, "Y": list(_bits.labels(y))},
        )
    return pair


def _still_private(d: Decomposition, i: int, j: int, mask: int) -> bool:
    return d.sets[i] & mask == mask and cover_count(mask, d.stage_sets(j)) == 1


def select_private_pairs(d: Decomposition) -> PairLedger:
    kernel_of = d.kernel_index()
    pairs: dict[tuple[int, int], PrivatePair] = {}
    anchors_so_far = {i: 0 for i in d.lifetimes}
    for st in d.stages:
        j = st.j
        for i in st.members:
            pair = find_private_pair(d, i, j, anchors_so_far[i])
            garbage = pair.mask & d.G
            if not garbage:
                raise NoGarbageVertex(
                    f"private pair {pair.labels()} of set {i + 1} at stage {j} has no garbage vertex",
                    {"set": i + 1, "stage": j, "pair": pair.labels()},
                )
            g = _bits.lowest(garbage)
            u = pair.hi if g == pair.lo else pair.lo
            selected = u
            rules = []

            if u in kernel_of and kernel_of[u][1] < j:
                a, _b = kernel_of[u]
                t_a = d.lifetimes[a]
                repl = d.kernel_vertex(a, j if j <= t_a else t_a)
                if repl != u:
                    u = repl
                    rules.append("R1")
                    if not _still_private(d, i, j, (1 << g) | (1 << u)):
                        raise ReplacementBrokePrivacy(
                            f"R1 broke privacy for set {i + 1} at stage {j}",
                            {"set": i + 1, "stage": j, "rule": "R1", "pair": [g + 1, u + 1]},
                        )

            if u in kernel_of and kernel_of[u][1] == j:
                a, _ = kernel_of[u]
                if j < d.lifetimes[a] and j < d.lifetimes[i]:
                    u = d.kernel_vertex(a, j + 1)
                    rules.append("R2")
                    if not _still_private(d, i, j, (1 << g) | (1 << u)):
                        raise ReplacementBrokePrivacy(
                            f"R2 broke privacy for set {i + 1} at stage {j}",
                            {"set": i + 1, "stage": j, "rule": "R2", "pair": [g + 1, u + 1]},
                        )

            pairs[(i, j)] = PrivatePair(i, j, g, u, selected, tuple(rules))
            anchors_so_far[i] |= 1 << g
    return PairLedger(pairs)


def verify_pair_lemmas(ledger: PairLedger, d: Decomposition) -> list[Check]:
    """Clauses (a)-(f) on the selected pairs, double cover of kernel pairs,
    and the garbage-vertex corollary (checked for every single-covered pair)."""
    checks = []
    kernel_of = d.kernel_index()
    by_time = {st.j: {p.pair for p in ledger.pairs.values() if p.time == st.j} for st in d.stages}

    fails = []
    for j1 in by_time:
        for j2 in by_time:
            if j1 < j2 and by_time[j1] & by_time[j2]:
                shared = min(by_time[j1] & by_time[j2])
                fails.append({"times": [j1, j2], "pair": shared.labels()})
    checks.append(verdict("pairs.a", fails))

    fails = []
    for st in d.stages:
        stage_sets = d.stage_sets(st.j)
        for s in range(st.j + 1):
            for p in sorted(by_time[s]):
                c = cover_count(p, stage_sets)
                if c > 1:
                    fails.append({"stage": st.j, "pair": p.labels(), "cover": c})
    checks.append(verdict("pairs.b", fails))

    fails = []
    for st in d.stages:
        if len(by_time[st.j]) != st.ell_j:
            fails.append({"stage": st.j, "distinct_pairs": len(by_time[st.j]), "ell_j": st.ell_j})
        for i in st.members:
            own = {p.pair for p in ledger.pairs.values() if p.owner == i and p.time == st.j}
            if len(own) != 1:
                fails.append({"stage": st.j, "set": i + 1, "pairs_at_stage": len(own)})
    extra = sorted(
        (i + 1, j) for (i, j) in ledger.pairs if j > d.t or i not in d.stages[j].members
    )
    if extra:
        fails.append({"unexpected": [list(e) for e in extra]})
    checks.append(verdict("pairs.c", fails))

    total = sum(st.ell_j for st in d.stages)
    distinct = len({p.pair for p in ledger.pairs.values()})
    if distinct != total:
        checks.append(Check("pairs.d", FAIL, {"distinct_pairs": distinct, "sum_ell": total}))
    elif d.genuine and total < d.system.n - 3 * d.system.m:
        checks.append(Check("pairs.d", FAIL, {"sum_ell": total, "n_minus_3m": d.system.n - 3 * d.system.m}))
    else:
        checks.append(Check("pairs.d", PASS))

    fails_e, fails_f = [], []
    last_kernels = {d.kernel_vertex(a, t_a) for a, t_a in d.lifetimes.items()}
    for (i, j), p in sorted(ledger.pairs.items()):
        u = p.non_anchor
        if u in kernel_of:
            a, b = kernel_of[u]
            if b < j and u not in last_kernels:
                fails_e.append({"set": i + 1, "stage": j, "non_anchor": u + 1})
            if b == j and j not in (d.lifetimes[a], d.lifetimes[i]):
                fails_f.append({"set": i + 1, "stage": j, "non_anchor": u + 1})
    checks.append(verdict("pairs.e", fails_e))
    checks.append(verdict("pairs.f", fails_f))

    fails = []
    for (i, j), p in sorted(ledger.pairs.items()):
        mask = p.pair.mask
        if not (1 << p.anchor) & d.G:
            fails.append({"set": i + 1, "stage": j, "anchor": p.anchor + 1, "reason": "anchor not garbage"})
        elif not _still_private(d, i, j, mask):
            fails.append({"set": i + 1, "stage": j, "pair": p.pair.labels(), "reason": "not private"})
        elif mask & ledger.anchors(i, j - 1):
            fails.append({"set": i + 1, "stage": j, "pair": p.pair.labels(), "reason": "meets earlier anchors"})
    for i in d.lifetimes:
        anchors = [p.anchor for p in ledger.of_owner(i)]
        if len(set(anchors)) != d.lifetimes[i] + 1 or len(anchors) != len(set(anchors)):
            fails.append({"set": i + 1, "anchors": sorted(a + 1 for a in anchors), "reason": "anchors"})
    checks.append(verdict("pairs.selection", fails))

    checks.append(verify_kernel_double_cover(d))
    checks.append(verify_garbage_corollary(d))
    return checks


def verify_kernel_double_cover(d: Decomposition) -> Check:
    """Every pair of kernel vertices lies in at least two sets of every stage."""
    if not d.genuine:
        return Check("kernel.double_cover", SKIPPED)
    fails = []
    kernel_pairs = [a | b for a, b in combinations([1 << x for x in _bits.bits(d.A)], 2)]
    for st in d.stages:
        stage_sets = d.stage_sets(st.j)
        for mask in kernel_pairs:
            c = cover_count(mask, stage_sets)
            if c < 2:
                fails.append({"stage": st.j, "pair": list(_bits.labels(mask)), "cover": c})
    return verdict("kernel.double_cover", fails)


def verify_garbage_corollary(d: Decomposition) -> Check:
    fails = []
    for st in d.stages:
        stage_sets = d.stage_sets(st.j)
        for i in st.members:
            for mask in _bits.subsets_of_size(d.sets[i], 2):
                if not mask & d.G and cover_count(mask, stage_sets) == 1:
                    fails.append({"stage": st.j, "set": i + 1, "pair": list(_bits.labels(mask))})
    return verdict("garbage_vertex", fails)
