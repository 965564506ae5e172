"""Exhaustive and randomized generation of (n,m)-systems at desk scale.

Two enumeration modes exist.

Labelled mode (``canonicalize=False``) walks families of k-subsets of [n] as
strictly increasing lists of set masks, pruning any prefix whose drop-one
intersections are already empty or which already violates property (ii).

Canonical mode (``canonicalize=True``) uses the fact that every family with
property (i) has distinct kernel vertices, so up to relabelling the kernel is
``{1..ell}`` and set ``i`` is ``[ell] - {i}`` plus a tail inside
``{ell+1..n}``. Tails are walked as non-decreasing tuples and the survivors
are deduplicated by canonical form.

Every emitted family passes ``validate_nm_system``; pruning is never trusted.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterator

from . import _bits
from .canon import canonical_form
from .errors import InfeasibleParameters, InvalidInput, UniverseTooLarge
from .setsystem import SetFamily, bounds_for_m, validate_nm_system

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class SearchSpec:
    n: int
    k: int | None = None
    ell_range: tuple[int, int | None] = (2, None)
    time_budget: float | None = None
    canonicalize: bool = True
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.n > _bits.MAX_UNIVERSE:
            raise UniverseTooLarge(f"n={self.n} exceeds the {_bits.MAX_UNIVERSE}-vertex limit", self.n)
        if self.n < 1:
            raise InfeasibleParameters(f"n={self.n} must be positive")
        lo, hi = self.ell_range
        if lo < 2 or (hi is not None and hi < lo):
            raise InfeasibleParameters(f"bad ell range {self.ell_range}")
        if self.jobs < 1:
            raise InfeasibleParameters("jobs must be at least 1")

    def ks(self) -> list[int]:
        if self.k is not None:
            return [self.k] if 3 <= self.k < self.n else []
        return list(range(3, self.n))

    def ells(self, k: int) -> range:
        lo, hi = self.ell_range
        # distinct kernel vertices: ell <= n, and each set holds ell - 1 of them
        top = min(self.n, k + 1) if hi is None else min(hi, self.n, k + 1)
        return range(lo, top + 1)

    def key(self) -> dict:
        """Fields that determine the result set (budget and jobs do not)."""
        return {"n": self.n, "k": self.k, "ell_range": list(self.ell_range), "canonicalize": self.canonicalize}


@dataclass
class SearchResult:
    systems: list[SetFamily] = field(default_factory=list)
    counts: dict[tuple[int, int], int] = field(default_factory=dict)
    max_n_witness: SetFamily | None = None
    exhausted: bool = True

    def summary(self) -> dict:
        return {
            "found": len(self.systems),
            "counts": [
                {"k": k, "ell": ell, "count": c} for (k, ell), c in sorted(self.counts.items())
            ],
            "max_n_witness": self.max_n_witness.to_json() if self.max_n_witness else None,
            "exhausted": self.exhausted,
        }


class _OutOfTime(Exception):
    pass


# -- property (ii) on partial families --------------------------------------


@lru_cache(maxsize=None)
def _triple_index(n: int) -> dict[int, int]:
    return {t: idx for idx, t in enumerate(_bits.subsets_of_size(_bits.full_mask(n), 3))}


@lru_cache(maxsize=None)
def _x_triples(n: int, k: int) -> tuple[int, ...]:
    index = _triple_index(n)
    out = []
    for x in _bits.subsets_of_size(_bits.full_mask(n), k + 1):
        bitset = 0
        for t in _bits.subsets_of_size(x, 3):
            bitset |= 1 << index[t]
        out.append(bitset)
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _covered_by(n: int, s: int) -> int:
    index = _triple_index(n)
    bitset = 0
    for t in _bits.subsets_of_size(s, 3):
        bitset |= 1 << index[t]
    return bitset


def _property_ii_dead(n: int, k: int, covered: int) -> bool:
    """True when some (k+1)-subset of [n] already has every triple covered."""
    return any(xt & ~covered == 0 for xt in _x_triples(n, k))


# -- labelled enumeration ---------------------------------------------------


def _labelled_unit(spec: SearchSpec, k: int, first: int, deadline: float | None) -> tuple[list[tuple[int, ...]], bool]:
    n = spec.n
    cands = list(_bits.subsets_of_size(_bits.full_mask(n), k))
    ell_lo = spec.ell_range[0]
    ell_hi = max(spec.ells(k), default=0)
    found: list[tuple[int, ...]] = []

    def drop_one_ok(chosen: list[int]) -> bool:
        for skip in range(len(chosen)):
            acc = -1
            for pos, s in enumerate(chosen):
                if pos != skip:
                    acc &= s
            if not acc:
                return False
        return True

    def extend(chosen: list[int], acc: int, covered: int, start: int) -> None:
        if deadline is not None and time.monotonic() > deadline:
            raise _OutOfTime
        if not acc:
            if len(chosen) >= ell_lo and _accept(SetFamily(n, tuple(chosen))):
                found.append(tuple(chosen))
            return
        if len(chosen) >= ell_hi:
            return
        for idx in range(start, len(cands)):
            s = cands[idx]
            chosen.append(s)
            cov = covered | _covered_by(n, s)
            if drop_one_ok(chosen) and not _property_ii_dead(n, k, cov):
                extend(chosen, acc & s, cov, idx + 1)
            chosen.pop()

    try:
        s0 = cands[first]
        if not _property_ii_dead(n, k, _covered_by(n, s0)):
            extend([s0], s0, _covered_by(n, s0), first + 1)
    except _OutOfTime:
        return found, False
    return found, True


# -- kernel-normalized enumeration ------------------------------------------


def _normalized_unit(
    spec: SearchSpec, k: int, ell: int, first: int, deadline: float | None
) -> tuple[list[tuple[int, ...]], bool]:
    n = spec.n
    tail_size = k - ell + 1
    tail_universe = _bits.full_mask(n) & ~_bits.full_mask(ell)
    tails = list(_bits.subsets_of_size(tail_universe, tail_size))
    heads = [_bits.full_mask(ell) & ~(1 << i) for i in range(ell)]
    found: list[tuple[int, ...]] = []

    def extend(chosen: list[int], covered: int, used: int, start: int) -> None:
        if deadline is not None and time.monotonic() > deadline:
            raise _OutOfTime
        pos = len(chosen)
        if pos == ell:
            if used == tail_universe and _accept(SetFamily(n, tuple(chosen))):
                found.append(tuple(sorted(chosen)))
            return
        if _bits.popcount(tail_universe & ~used) > (ell - pos) * tail_size:
            return
        for idx in range(start, len(tails)):
            s = heads[pos] | tails[idx]
            cov = covered | _covered_by(n, s)
            if _property_ii_dead(n, k, cov):
                continue
            chosen.append(s)
            extend(chosen, cov, used | tails[idx], idx)
            chosen.pop()

    try:
        s0 = heads[0] | tails[first]
        cov = _covered_by(n, s0)
        if not _property_ii_dead(n, k, cov):
            extend([s0], cov, tails[first], first)
    except _OutOfTime:
        return found, False
    return found, True


def _accept(family: SetFamily) -> bool:
    try:
        validate_nm_system(family)
    except InvalidInput:
        return False
    return True


def _units(spec: SearchSpec) -> list[tuple[int, ...]]:
    units = []
    for k in spec.ks():
        if spec.canonicalize:
            for ell in spec.ells(k):
                tail_size = k - ell + 1
                if tail_size < 0 or tail_size > spec.n - ell:
                    continue
                for first in range(comb(spec.n - ell, tail_size)):
                    units.append((k, ell, first))
        else:
            if not spec.ells(k):
                continue
            for first in range(comb(spec.n, k)):
                units.append((k, first))
    return units


def _run_unit(args: tuple[SearchSpec, tuple[int, ...], float | None]) -> tuple[list[tuple[int, ...]], bool]:
    spec, unit, deadline = args
    if spec.canonicalize:
        return _normalized_unit(spec, *unit, deadline)
    return _labelled_unit(spec, *unit, deadline)


def _load_checkpoint(path: str | None, spec: SearchSpec) -> dict:
    if not path or not os.path.exists(path):
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if data.get("version") != CHECKPOINT_VERSION or data.get("spec") != spec.key():
        raise ValueError(f"checkpoint {path} belongs to a different search")
    return {tuple(entry["unit"]): [tuple(f) for f in entry["found"]] for entry in data["completed"]}


def _save_checkpoint(path: str, spec: SearchSpec, done: dict) -> None:
    data = {
        "version": CHECKPOINT_VERSION,
        "spec": spec.key(),
        "completed": [{"unit": list(u), "found": [list(f) for f in done[u]]} for u in sorted(done)],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(data, fh)
    os.replace(tmp, path)


def enumerate_systems(
    spec: SearchSpec,
    *,
    checkpoint: str | None = None,
    limit: int | None = None,
) -> SearchResult:
    """Enumerate (n,m)-systems per ``spec``.

    Work is split into subtrees keyed by the first set choice; results are
    merged in key order, so output does not depend on ``jobs``. With a
    ``checkpoint`` path, finished subtrees are recorded and skipped on resume.
    ``limit`` stops after that many raw finds (the result is then not exhausted).
    """
    deadline = None if spec.time_budget is None else time.monotonic() + spec.time_budget
    units = _units(spec)
    done = _load_checkpoint(checkpoint, spec)
    todo = [u for u in units if u not in done]
    exhausted = True

    def record(unit, found, complete):
        nonlocal exhausted
        if complete:
            done[unit] = found
            if checkpoint:
                _save_checkpoint(checkpoint, spec, done)
        else:
            exhausted = False
            partial[unit] = found

    partial: dict = {}
    raw_count = sum(len(f) for f in done.values())
    if spec.jobs == 1 or len(todo) < 2:
        for unit in todo:
            if limit is not None and raw_count >= limit:
                exhausted = False
                break
            found, complete = _run_unit((spec, unit, deadline))
            raw_count += len(found)
            record(unit, found, complete)
            if not complete:
                break
    else:
        # time.monotonic is not comparable across processes
        wall_deadline = None if deadline is None else time.time() + (deadline - time.monotonic())
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            futures = [(u, pool.submit(_run_unit_wall, spec, u, wall_deadline)) for u in todo]
            for unit, fut in futures:
                found, complete = fut.result()
                record(unit, found, complete)

    merged = [done[u] for u in units if u in done] + [partial[u] for u in units if u in partial]
    result = SearchResult(exhausted=exhausted)
    n = spec.n
    if spec.canonicalize:
        forms = {}
        for fam in (f for group in merged for f in group):
            form = canonical_form(fam, n)
            forms.setdefault(form, form)
        ordered = sorted(forms, key=lambda f: (_bits.popcount(f[0]), len(f), f))
    else:
        ordered = [f for group in merged for f in group]
    for sets in ordered:
        fam = SetFamily(n, sets)
        result.systems.append(fam)
        key = (_bits.popcount(sets[0]), len(sets))
        result.counts[key] = result.counts.get(key, 0) + 1
    if limit is not None and len(result.systems) > limit:
        del result.systems[limit:]
    if result.systems:
        result.max_n_witness = result.systems[0]
    return result


def _run_unit_wall(spec: SearchSpec, unit: tuple[int, ...], wall_deadline: float | None):
    if wall_deadline is None:
        return _run_unit((spec, unit, None))
    remaining = wall_deadline - time.time()
    return _run_unit((spec, unit, time.monotonic() + max(remaining, 0.0)))


def extremal_n(m: int, n_max: int, budget: float | None = None, *, ell_min: int = 2) -> dict:
    """Largest n <= ``n_max`` with an (n, m)-system found inside the budget."""
    b = bounds_for_m(m)
    if n_max > _bits.MAX_UNIVERSE:
        raise UniverseTooLarge(f"n={n_max} exceeds the {_bits.MAX_UNIVERSE}-vertex limit", n_max)
    deadline = None if budget is None else time.monotonic() + budget
    exhausted_by_n = {}
    best_n, witness = None, None
    for n in range(n_max, 3, -1):
        k = n - m
        if k < 3:
            break
        remaining = None if deadline is None else max(deadline - time.monotonic(), 0.0)
        spec = SearchSpec(n, k, (ell_min, None), remaining, canonicalize=True)
        res = enumerate_systems(spec, limit=1)
        if res.systems:
            best_n, witness = n, res.systems[0]
            break
        exhausted_by_n[n] = res.exhausted
    return {
        "m": m,
        "best_n": best_n,
        "witness": witness.to_json() if witness else None,
        "conjecture": b.conjecture,
        "main_bound": b.main,
        "ruled_out": sorted(n for n, ex in exhausted_by_n.items() if ex),
        "not_exhausted": sorted(n for n, ex in exhausted_by_n.items() if not ex),
    }


def random_critical_family(n: int, ell: int, seed: int) -> SetFamily:
    """A family with property (i) by construction; property (ii) is not attempted.

    Kernel vertices ``x_1..x_ell`` are distinct random vertices and set ``i``
    holds every kernel vertex except ``x_i`` plus a random fill of the other
    vertices. A fill vertex landing in every set is pulled out of one of them.
    """
    if ell < 2 or ell > n:
        raise InfeasibleParameters(f"need 2 <= ell <= n, got ell={ell}, n={n}")
    rng = random.Random(seed)
    kernel = rng.sample(range(n), ell)
    others = [v for v in range(n) if v not in kernel]
    sets = []
    for i in range(ell):
        s = 0
        for pos, x in enumerate(kernel):
            if pos != i:
                s |= 1 << x
        for v in others:
            if rng.random() < 0.5:
                s |= 1 << v
        sets.append(s)
    for v in others:
        if all(s >> v & 1 for s in sets):
            i = rng.randrange(ell)
            sets[i] &= ~(1 << v)
    return SetFamily(n, tuple(sets))


def sample_systems(spec: SearchSpec, count: int) -> list[SetFamily]:
    """Randomized mode: draw kernel-normalized families with seed ``spec.seed``
    and keep the ones that validate (duplicates possible, order deterministic)."""
    rng = random.Random(spec.seed)
    out = []
    options = [(k, ell) for k in spec.ks() for ell in spec.ells(k) if 0 <= k - ell + 1 <= spec.n - ell]
    if not options:
        return out
    for _ in range(count):
        k, ell = rng.choice(options)
        tail_pool = list(range(ell, spec.n))
        sets = []
        for i in range(ell):
            head = _bits.full_mask(ell) & ~(1 << i)
            tail = _bits.mask_of(v + 1 for v in rng.sample(tail_pool, k - ell + 1))
            sets.append(head | tail)
        fam = SetFamily(spec.n, tuple(sets))
        if _accept(fam):
            out.append(fam)
    return out


def stream_lines(result: SearchResult) -> Iterator[str]:
    for fam in result.systems:
        yield json.dumps(fam.to_json())
