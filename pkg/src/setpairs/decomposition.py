"""Staged kernel decomposition of a family satisfying property (i).

Stage 0 takes every set and picks, for each ``i``, a kernel vertex in the
intersection of all other sets. Each later stage takes a minimal subfamily
(with respect to property (i)) of the current remainders, i.e. the sets with
every earlier kernel removed, and picks kernel vertices from it the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import _bits
from .errors import EllTooSmall, KernelChoiceImpossible
from .report import FAIL, PASS, SKIPPED, Check, verdict
from .setsystem import NMSystem, SetFamily

SUBFAMILY_RULES = ("lexicographic", "last")
KERNEL_RULES = ("smallest-vertex",)


@dataclass(frozen=True)
class Policy:
    min_stage_size: int = 4
    subfamily_rule: str = "lexicographic"
    kernel_rule: str = "smallest-vertex"

    def __post_init__(self):
        if self.min_stage_size < 2:
            raise ValueError("min_stage_size must be at least 2")
        if self.subfamily_rule not in SUBFAMILY_RULES:
            raise ValueError(f"unknown subfamily rule {self.subfamily_rule!r}")
        if self.kernel_rule not in KERNEL_RULES:
            raise ValueError(f"unknown kernel rule {self.kernel_rule!r}")

    def to_json(self) -> dict:
        return {
            "min_stage_size": self.min_stage_size,
            "subfamily_rule": self.subfamily_rule,
            "kernel_rule": self.kernel_rule,
        }


@dataclass(frozen=True)
class Stage:
    j: int
    members: tuple[int, ...]
    # member index -> 0-based kernel vertex, in member order
    kernel: dict[int, int]

    @property
    def ell_j(self) -> int:
        return len(self.members)

    @property
    def kernel_mask(self) -> int:
        mask = 0
        for x in self.kernel.values():
            mask |= 1 << x
        return mask


@dataclass(frozen=True)
class Decomposition:
    family: SetFamily
    system: NMSystem | None
    policy: Policy
    stages: tuple[Stage, ...]
    remainders: tuple[tuple[int, ...], ...]
    lifetimes: dict[int, int] = field(repr=False)
    A: int = 0
    G: int = 0

    @property
    def t(self) -> int:
        return len(self.stages) - 1

    @property
    def genuine(self) -> bool:
        """True when lemma guarantees apply: a validated system and stage floor 4."""
        return self.system is not None and self.policy.min_stage_size == 4

    @property
    def sets(self) -> tuple[int, ...]:
        return self.family.sets

    def kernel_vertex(self, i: int, j: int) -> int:
        return self.stages[j].kernel[i]

    def kernel_index(self) -> dict[int, tuple[int, int]]:
        """0-based kernel vertex -> (set index, stage)."""
        return {x: (i, st.j) for st in self.stages for i, x in st.kernel.items()}

    def stage_sets(self, j: int) -> list[int]:
        return [self.sets[i] for i in self.stages[j].members]

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "stages": [
                {
                    "j": st.j,
                    "members": [i + 1 for i in st.members],
                    "kernel": [[i + 1, st.kernel[i] + 1] for i in st.members],
                    "remainders": [list(_bits.labels(r)) for r in self.remainders[st.j]],
                }
                for st in self.stages
            ],
            "lifetimes": [[i + 1, self.lifetimes[i]] for i in sorted(self.lifetimes)],
            "A": list(_bits.labels(self.A)),
            "G": list(_bits.labels(self.G)),
        }


def minimal_critical_subfamilies(sets: Sequence[int], min_size: int) -> list[tuple[int, ...]]:
    """Index subsets ``S`` (size >= ``min_size``) with empty intersection whose
    every drop-one intersection is nonempty, in lexicographic order.

    A minimal subfamily has no proper subfamily with empty intersection, so the
    search never extends a prefix whose running intersection is already empty.
    """
    if min_size < 2:
        raise ValueError("min_size must be at least 2")
    universe = -1  # every bit set
    out: list[tuple[int, ...]] = []
    count = len(sets)

    def is_minimal(chosen: list[int]) -> bool:
        for drop in range(len(chosen)):
            acc = universe
            for pos, idx in enumerate(chosen):
                if pos != drop:
                    acc &= sets[idx]
            if not acc:
                return False
        return True

    def extend(chosen: list[int], acc: int, start: int) -> None:
        for idx in range(start, count):
            nxt = acc & sets[idx]
            chosen.append(idx)
            if nxt:
                extend(chosen, nxt, idx + 1)
            elif len(chosen) >= min_size and is_minimal(chosen):
                out.append(tuple(chosen))
            chosen.pop()

    extend([], universe, 0)
    return out


def _pick_kernel(remainders: dict[int, int], members: Sequence[int], j: int) -> dict[int, int]:
    kernel = {}
    for i in members:
        acc = -1
        for r in members:
            if r != i:
                acc &= remainders[r]
        if acc <= 0:
            raise KernelChoiceImpossible(
                f"no kernel vertex for set {i + 1} at stage {j}", {"set": i + 1, "stage": j}
            )
        kernel[i] = _bits.lowest(acc)
    used = list(kernel.values())
    if len(set(used)) != len(used):
        raise KernelChoiceImpossible(
            f"kernel vertices collide at stage {j}", {"stage": j, "kernel": sorted(x + 1 for x in used)}
        )
    return kernel


def run_decomposition(
    system: NMSystem | SetFamily,
    policy: Policy | None = None,
    *,
    mechanics: bool = False,
) -> Decomposition:
    """Run the staged decomposition.

    Passing a bare ``SetFamily`` requires ``mechanics=True``; the family then
    only needs property (i) and lemma bounds tied to k and m are not claimed.
    """
    policy = policy or Policy()
    if isinstance(system, NMSystem):
        family, nm = system.family, system
    else:
        if not mechanics:
            raise TypeError("a bare SetFamily needs mechanics=True (validation bypass)")
        family, nm = system, None
    sets = family.sets
    if family.ell < policy.min_stage_size:
        raise EllTooSmall(
            f"ell={family.ell} is below the stage floor {policy.min_stage_size}", family.ell
        )

    members = tuple(range(family.ell))
    kernel = _pick_kernel({i: sets[i] for i in members}, members, 0)
    stages = [Stage(0, members, kernel)]
    removed = stages[0].kernel_mask
    remainders = [tuple(sets[i] & ~removed for i in members)]

    while True:
        current = stages[-1].members
        rem = remainders[-1]
        candidates = minimal_critical_subfamilies(rem, policy.min_stage_size)
        if not candidates:
            break
        pick = candidates[0] if policy.subfamily_rule == "lexicographic" else candidates[-1]
        nxt_members = tuple(current[p] for p in pick)
        j = len(stages)
        rem_map = {current[p]: rem[p] for p in pick}
        kernel = _pick_kernel(rem_map, nxt_members, j)
        stage = Stage(j, nxt_members, kernel)
        stages.append(stage)
        removed |= stage.kernel_mask
        remainders.append(tuple(sets[i] & ~removed for i in nxt_members))

    lifetimes = {i: max(st.j for st in stages if i in st.members) for i in range(family.ell)}
    A = removed
    return Decomposition(
        family=family,
        system=nm,
        policy=policy,
        stages=tuple(stages),
        remainders=tuple(remainders),
        lifetimes=lifetimes,
        A=A,
        G=family.union & ~A,
    )


def verify_observations(d: Decomposition) -> list[Check]:
    """Structural observations (a)-(e) on a finished decomposition.

    (d) and (e) need k and m, so they are skipped unless the decomposition
    ran on a validated system with the stage floor at 4.
    """
    checks = []

    fails = []
    seen = 0
    for st in d.stages:
        if seen & st.kernel_mask:
            fails.append({"stage": st.j, "shared": list(_bits.labels(seen & st.kernel_mask))})
        seen |= st.kernel_mask
    checks.append(verdict("observations.a", fails))

    floor = 4 if d.genuine else d.policy.min_stage_size
    fails = [
        {"stage": st.j, "ell_j": st.ell_j}
        for st in d.stages
        if _bits.popcount(st.kernel_mask) != st.ell_j or st.ell_j < floor
    ]
    checks.append(verdict("observations.b", fails))

    fails = []
    for i, t_i in sorted(d.lifetimes.items()):
        for r in range(t_i + 1):
            st = d.stages[r]
            got = _bits.popcount(d.sets[i] & st.kernel_mask)
            if got != st.ell_j - 1:
                fails.append({"set": i + 1, "stage": r, "size": got, "expected": st.ell_j - 1})
    checks.append(verdict("observations.c", fails))

    if d.genuine:
        n, m = d.system.n, d.system.m
        checks.append(
            Check("observations.d", PASS)
            if d.t < m
            else Check("observations.d", FAIL, {"t": d.t, "m": m})
        )
        total = sum(st.ell_j for st in d.stages)
        checks.append(
            Check("observations.e", PASS)
            if total >= n - 3 * m
            else Check("observations.e", FAIL, {"sum_ell": total, "n_minus_3m": n - 3 * m})
        )
    else:
        checks.append(Check("observations.d", SKIPPED))
        checks.append(Check("observations.e", SKIPPED))
    return checks


def structural_invariants(d: Decomposition) -> list[str]:
    """Invariants of the data type itself; returns human-readable violations."""
    problems = []
    for st in d.stages:
        for i, x in st.kernel.items():
            if d.sets[i] >> x & 1:
                problems.append(f"kernel vertex {x + 1} of set {i + 1} lies in that set")
    for a, b in zip(d.stages, d.stages[1:]):
        if not set(b.members) <= set(a.members):
            problems.append(f"stage {b.j} members are not nested in stage {a.j}")
    if d.A & d.G or (d.A | d.G) != d.family.union:
        problems.append("A and G do not partition V")
    return problems
