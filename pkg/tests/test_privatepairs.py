import pytest

from setpairs import _bits
from setpairs.decomposition import Policy, run_decomposition
from setpairs.errors import NoGarbageVertex, NoPrivatePair
from setpairs.privatepairs import (
    Pair,
    cover_count,
    find_private_pair,
    select_private_pairs,
    smallest_private_pair,
    verify_pair_lemmas,
)
from setpairs.search import random_critical_family
from setpairs.setsystem import SetFamily, validate_nm_system


def test_sp7_pairs(sp7):
    d = run_decomposition(validate_nm_system(sp7))
    ledger = select_private_pairs(d)
    got = [(p["pair"], p["anchor"], p["rules"]) for p in ledger.to_json()]
    assert got == [([2, 5], 5, []), ([1, 5], 5, []), ([1, 6], 6, []), ([1, 7], 7, [])]
    assert all(c.ok for c in verify_pair_lemmas(ledger, d))


def test_cover_count_uses_full_sets(sp7):
    stage = list(sp7.sets)
    assert cover_count(Pair.of(0, 1), stage) == 2  # {1,2} lies in N3, N4
    assert cover_count(Pair.of(1, 4), stage) == 1


def test_smallest_private_pair_respects_y():
    stage = [_bits.mask_of([1, 2, 3]), _bits.mask_of([2, 3, 4])]
    assert smallest_private_pair(stage[0], stage).labels() == [1, 2]
    assert smallest_private_pair(stage[0], stage, _bits.mask_of([1])) is None


def test_find_private_pair_errors(sp7):
    d = run_decomposition(sp7, mechanics=True)
    with pytest.raises(NoPrivatePair):
        find_private_pair(d, 0, 0, _bits.mask_of([2, 3, 4]))
    with pytest.raises(ValueError):
        find_private_pair(d, 0, 0, _bits.mask_of([1]))


def test_replacement_rules_fire(rules_family):
    d = run_decomposition(rules_family, mechanics=True)
    ledger = select_private_pairs(d)
    kernel_of = d.kernel_index()
    fired = {p.rules for p in ledger.pairs.values()}
    assert ("R1",) in fired and ("R2",) in fired
    for (i, j), p in ledger.pairs.items():
        stage_sets = d.stage_sets(j)
        assert cover_count(p.pair, stage_sets) == 1
        assert d.sets[i] & p.pair.mask == p.pair.mask
        if "R2" in p.rules:
            a, b = kernel_of[p.selected_non_anchor]
            assert b == j and p.non_anchor == d.kernel_vertex(a, j + 1)
        if "R1" in p.rules:
            a, b = kernel_of[p.selected_non_anchor]
            assert b < j and p.non_anchor == d.kernel_vertex(a, min(j, d.lifetimes[a]))
        if not p.rules:
            assert p.non_anchor == p.selected_non_anchor
    # after replacement, non-anchors obey clauses (e) and (f)
    by_name = {c.name: c.status for c in verify_pair_lemmas(ledger, d)}
    assert by_name["pairs.e"] == by_name["pairs.f"] == "pass"


def test_no_garbage_vertex_is_a_finding():
    # two stages swallow every vertex into the kernel, so G is empty
    fam = SetFamily.from_lists(6, [[1, 2, 3, 5], [1, 2, 3, 4], [2, 4, 5, 6], [3, 4, 5]])
    d = run_decomposition(fam, Policy(min_stage_size=2), mechanics=True)
    with pytest.raises(NoGarbageVertex) as exc:
        select_private_pairs(d)
    assert exc.value.witness == {"set": 1, "stage": 0, "pair": [1, 5]}


def test_mechanics_findings_are_clean():
    seen = set()
    for seed in range(300):
        fam = random_critical_family(9, 5, seed)
        d = run_decomposition(fam, Policy(min_stage_size=2), mechanics=True)
        try:
            ledger = select_private_pairs(d)
        except (NoPrivatePair, NoGarbageVertex) as exc:
            assert exc.witness["stage"] <= d.t
            seen.add(type(exc))
            continue
        assert len(ledger.pairs) == sum(st.ell_j for st in d.stages)
    assert seen


def test_searched_systems_satisfy_pair_lemmas(searched_systems):
    for fam in searched_systems:
        d = run_decomposition(validate_nm_system(fam))
        ledger = select_private_pairs(d)
        bad = [c for c in verify_pair_lemmas(ledger, d) if not c.ok]
        assert bad == [], fam.to_json()
