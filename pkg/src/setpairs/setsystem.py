"""Set families, (n,m)-system validation and the reference bounds.

Sets are bit masks over the universe ``[n]``: vertex ``v`` is bit ``v - 1``.
Set indices are 0-based in the Python API and 1-based in JSON and CLI output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Mapping, Sequence

from . import _bits
from .errors import (
    EllTooSmall,
    KTooSmall,
    NonPositiveM,
    NonUniformSizes,
    PropertyIFailed,
    PropertyIIFailed,
    UniverseTooLarge,
    UnusedVertex,
)


@dataclass(frozen=True)
class SetFamily:
    n: int
    sets: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"universe size must be a positive integer, got {self.n!r}")
        if self.n > _bits.MAX_UNIVERSE:
            raise UniverseTooLarge(f"n={self.n} exceeds the {_bits.MAX_UNIVERSE}-vertex limit")
        if not self.sets:
            raise ValueError("a family needs at least one set")
        universe = _bits.full_mask(self.n)
        for i, s in enumerate(self.sets):
            if s & ~universe:
                raise ValueError(f"set {i + 1} has members outside [1, {self.n}]")

    @classmethod
    def from_lists(cls, n: int, sets: Sequence[Sequence[int]]) -> "SetFamily":
        masks = []
        for s in sets:
            if len(set(s)) != len(s):
                raise ValueError(f"set {list(s)} repeats a vertex")
            if any(not isinstance(v, int) or isinstance(v, bool) or not 1 <= v <= n for v in s):
                raise ValueError(f"set {list(s)} has ids outside [1, {n}]")
            masks.append(_bits.mask_of(s))
        return cls(n, tuple(masks))

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "SetFamily":
        if not isinstance(obj, Mapping) or "n" not in obj or "sets" not in obj:
            raise ValueError('set-system JSON needs "n" and "sets"')
        n, sets = obj["n"], obj["sets"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError('"n" must be an integer')
        if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
            raise ValueError('"sets" must be a list of lists')
        return cls.from_lists(n, sets)

    def to_json(self) -> dict:
        return {"n": self.n, "sets": [list(_bits.labels(s)) for s in self.sets]}

    @property
    def ell(self) -> int:
        return len(self.sets)

    @property
    def universe(self) -> int:
        return _bits.full_mask(self.n)

    @property
    def union(self) -> int:
        acc = 0
        for s in self.sets:
            acc |= s
        return acc

    def as_lists(self) -> list[tuple[int, ...]]:
        return [_bits.labels(s) for s in self.sets]


@dataclass(frozen=True)
class NMSystem:
    family: SetFamily
    k: int
    m: int
    ell: int
    V: int

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def sets(self) -> tuple[int, ...]:
        return self.family.sets


@dataclass(frozen=True)
class TripleHypergraph:
    n: int
    triples: tuple[int, ...]

    def as_lists(self) -> list[tuple[int, ...]]:
        return [_bits.labels(t) for t in self.triples]


@dataclass(frozen=True)
class PropertyReport:
    holds: bool
    witness: Any = None
    # "vertex" (nonempty full intersection), "index" (empty drop-one
    # intersection) or "subset" (property (ii) counterexample)
    kind: str | None = None


@dataclass(frozen=True)
class Bounds:
    conjecture: int
    main: int
    tuza: Fraction


def check_property_i(family: SetFamily) -> PropertyReport:
    universe = family.universe
    full = _bits.intersect_all(family.sets, universe)
    if full:
        return PropertyReport(False, _bits.lowest(full) + 1, "vertex")
    for i in range(family.ell):
        rest = family.sets[:i] + family.sets[i + 1:]
        if not _bits.intersect_all(rest, universe):
            return PropertyReport(False, i, "index")
    return PropertyReport(True)


def uncovered_triples(family: SetFamily) -> TripleHypergraph:
    if family.n < 3:
        raise ValueError("uncovered triples need n >= 3")
    out = [
        t
        for t in _bits.subsets_of_size(family.union, 3)
        if not any(t & s == t for s in family.sets)
    ]
    return TripleHypergraph(family.n, tuple(out))


def _first_saturated_subset(vertex_set: int, size: int, triples: Sequence[int]) -> int | None:
    for x in _bits.subsets_of_size(vertex_set, size):
        if not any(t & x == t for t in triples):
            return x
    return None


def check_property_ii(family: SetFamily, k: int) -> PropertyReport:
    """Every (k+1)-subset of V must contain a triple lying in no member set."""
    triples = uncovered_triples(family).triples
    witness = _first_saturated_subset(family.union, k + 1, triples)
    if witness is None:
        return PropertyReport(True)
    return PropertyReport(False, _bits.labels(witness), "subset")


def validate_nm_system(family: SetFamily) -> NMSystem:
    sizes = {_bits.popcount(s) for s in family.sets}
    if len(sizes) != 1:
        raise NonUniformSizes(f"set sizes differ: {sorted(sizes)}", sorted(sizes))
    (k,) = sizes
    V = family.union
    unused = family.universe & ~V
    if unused:
        v = _bits.lowest(unused) + 1
        raise UnusedVertex(f"vertex {v} lies in no set", v)
    if k < 3:
        raise KTooSmall(f"k={k} < 3", k)
    if family.ell < 2:
        raise EllTooSmall(f"ell={family.ell} < 2", family.ell)
    rep = check_property_i(family)
    if not rep.holds:
        if rep.kind == "vertex":
            msg = f"property (i) failed: vertex {rep.witness} lies in every set"
        else:
            msg = f"property (i) failed: dropping set {rep.witness + 1} leaves an empty intersection"
        key = "vertex" if rep.kind == "vertex" else "set"
        raise PropertyIFailed(msg, {key: rep.witness if key == "vertex" else rep.witness + 1})
    rep = check_property_ii(family, k)
    if not rep.holds:
        raise PropertyIIFailed(
            "property (ii) failed, witness {" + ",".join(map(str, rep.witness)) + "}",
            list(rep.witness),
        )
    return NMSystem(family, k, family.n - k, family.ell, V)


def bounds_for_m(m: int) -> Bounds:
    if m < 1:
        raise NonPositiveM(f"m={m} must be at least 1", m)
    return Bounds(comb(m + 2, 2), m * m + 6 * m + 2, Fraction(3, 4) * m * m + m + 1)


def sp7_family() -> SetFamily:
    """Seven-vertex, four-set system with k=4, m=3 used as the shared fixture."""
    return SetFamily.from_lists(7, [[2, 3, 4, 5], [1, 3, 4, 5], [1, 2, 4, 6], [1, 2, 3, 7]])


def disjoint_pair_family() -> SetFamily:
    return SetFamily.from_lists(6, [[1, 2, 3], [4, 5, 6]])


def k4_family() -> SetFamily:
    return SetFamily.from_lists(4, [[2, 3, 4], [1, 3, 4], [1, 2, 4], [1, 2, 3]])

