"""Skew set-pair systems: the m-set recursion, assembly from free pairs,
the skew condition verifier and the binomial bound."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Any, Mapping

from . import _bits
from .decomposition import Decomposition
from .errors import RecursionSizeViolation
from .freepairs import FreeMarking
from .privatepairs import PairLedger
from .setsystem import NMSystem


@dataclass(frozen=True)
class SetPairSystem:
    r: int
    s: int
    entries: tuple[tuple[int, int], ...]

    @property
    def h(self) -> int:
        return len(self.entries)

    @classmethod
    def from_lists(cls, r: int, s: int, entries) -> "SetPairSystem":
        return cls(r, s, tuple((_bits.mask_of(a), _bits.mask_of(b)) for a, b in entries))

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "SetPairSystem":
        try:
            r, s, pairs = obj["r"], obj["s"], obj["pairs"]
            entries = [(p["a"], p["b"]) for p in pairs]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed set-pair JSON: {exc}") from exc
        for name, val in (("r", r), ("s", s)):
            if not isinstance(val, int) or isinstance(val, bool) or val < 0:
                raise ValueError(f'"{name}" must be a non-negative integer')
        for a, b in entries:
            for side in (a, b):
                if not isinstance(side, list) or not all(
                    isinstance(v, int) and not isinstance(v, bool) and 1 <= v <= _bits.MAX_UNIVERSE
                    for v in side
                ):
                    raise ValueError(f"bad set {side!r} in set-pair JSON")
                if len(set(side)) != len(side):
                    raise ValueError(f"set {side!r} repeats a vertex")
        return cls.from_lists(r, s, entries)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "pairs": [{"a": list(_bits.labels(a)), "b": list(_bits.labels(b))} for a, b in self.entries],
        }


@dataclass(frozen=True)
class SkewReport:
    valid: bool
    witness: tuple | None = None
    # "size", "a" (A_i meets B_i) or "b" (A_i misses B_j, i < j); 1-based indices
    condition: str | None = None


@dataclass(frozen=True)
class BoundReport:
    h: int
    bound: int
    ok: bool

    @property
    def tight(self) -> bool:
        return self.h == self.bound


def build_m_sets(
    system: NMSystem, d: Decomposition, ledger: PairLedger, marking: FreeMarking
) -> dict[tuple[int, int], int]:
    """``M[i, j]`` for every set ``i`` and ``0 <= j <= t_i``.

    Start from the complement of ``N_i``; step ``j`` swaps the previous kernel
    vertex of ``i`` for the previous anchor whenever the previous pair is free.
    """
    free = set(marking.free_pairs)
    m = system.m
    table: dict[tuple[int, int], int] = {}
    for i, t_i in sorted(d.lifetimes.items()):
        cur = system.V & ~system.sets[i]
        if _bits.popcount(cur) != m:
            raise RecursionSizeViolation(f"complement of set {i + 1} has the wrong size", {"set": i + 1, "stage": 0})
        table[(i, 0)] = cur
        for j in range(1, t_i + 1):
            if (i, j - 1) in free:
                x = d.kernel_vertex(i, j - 1)
                g = ledger.pairs[(i, j - 1)].anchor
                if not cur >> x & 1 or cur >> g & 1 or x == d.kernel_vertex(i, t_i):
                    raise RecursionSizeViolation(
                        f"m-set step for set {i + 1} at stage {j} is not a swap",
                        {"set": i + 1, "stage": j, "remove": x + 1, "add": g + 1},
                    )
                cur = (cur & ~(1 << x)) | (1 << g)
            if _bits.popcount(cur) != m:
                raise RecursionSizeViolation(f"m-set of set {i + 1} at stage {j} has the wrong size", {"set": i + 1, "stage": j})
            table[(i, j)] = cur
    return table


def m_sets_to_json(table: dict[tuple[int, int], int]) -> list[dict]:
    return [
        {"owner": i + 1, "time": j, "set": list(_bits.labels(table[(i, j)]))}
        for i, j in sorted(table, key=lambda k: (k[1], k[0]))
    ]


def assemble_skew_system(
    ledger: PairLedger, marking: FreeMarking, msets: dict[tuple[int, int], int], m: int | None = None
) -> SetPairSystem:
    order = sorted(marking.free_pairs, key=lambda key: (key[1], key[0]))
    entries = tuple((ledger.pairs[key].pair.mask, msets[key]) for key in order)
    if m is None:
        m = _bits.popcount(next(iter(msets.values()))) if msets else 0
    return SetPairSystem(2, m, entries)


def verify_skew(sys: SetPairSystem) -> SkewReport:
    for idx, (a, b) in enumerate(sys.entries, start=1):
        if _bits.popcount(a) != sys.r or _bits.popcount(b) != sys.s:
            return SkewReport(False, (idx,), "size")
    for idx, (a, b) in enumerate(sys.entries, start=1):
        if a & b:
            return SkewReport(False, (idx,), "a")
    for i, (a, _) in enumerate(sys.entries, start=1):
        for j in range(i, len(sys.entries)):
            if not a & sys.entries[j][1]:
                return SkewReport(False, (i, j + 1), "b")
    return SkewReport(True)


def bollobas_bound_check(sys: SetPairSystem) -> BoundReport:
    bound = comb(sys.r + sys.s, sys.r)
    return BoundReport(sys.h, bound, sys.h <= bound)
