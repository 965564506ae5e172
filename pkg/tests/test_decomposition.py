import pytest
from hypothesis import given, settings, strategies as st

from setpairs import _bits
from setpairs.decomposition import (
    Policy,
    minimal_critical_subfamilies,
    run_decomposition,
    structural_invariants,
    verify_observations,
)
from setpairs.errors import EllTooSmall, KernelChoiceImpossible
from setpairs.search import random_critical_family
from setpairs.setsystem import validate_nm_system


def test_sp7_single_stage(sp7):
    d = run_decomposition(validate_nm_system(sp7))
    assert d.t == 0
    assert d.genuine
    assert _bits.labels(d.A) == (1, 2, 3, 4)
    assert _bits.labels(d.G) == (5, 6, 7)
    assert d.stages[0].kernel == {0: 0, 1: 1, 2: 2, 3: 3}
    assert [_bits.labels(r) for r in d.remainders[0]] == [(5,), (5,), (6,), (7,)]
    assert all(c.ok for c in verify_observations(d))
    assert structural_invariants(d) == []


def test_json_is_one_based(sp7):
    doc = run_decomposition(validate_nm_system(sp7)).to_json()
    assert doc["stages"][0]["members"] == [1, 2, 3, 4]
    assert doc["stages"][0]["kernel"] == [[1, 1], [2, 2], [3, 3], [4, 4]]
    assert doc["lifetimes"] == [[1, 0], [2, 0], [3, 0], [4, 0]]


def test_small_ell_is_out_of_scope(six_three):
    with pytest.raises(EllTooSmall):
        run_decomposition(validate_nm_system(six_three))


def test_bare_family_needs_mechanics(sp7):
    with pytest.raises(TypeError):
        run_decomposition(sp7)
    d = run_decomposition(sp7, mechanics=True)
    assert not d.genuine
    names = {c.name: c.status for c in verify_observations(d)}
    assert names["observations.d"] == names["observations.e"] == "skipped"


def test_multi_stage_mechanics(rules_family):
    d = run_decomposition(rules_family, mechanics=True)
    assert d.t == 1
    assert [c.status for c in verify_observations(d)][:3] == ["pass"] * 3
    assert structural_invariants(d) == []


def test_subfamily_rules_differ_only_in_choice():
    # {0,1,2,3} and {0,1,4,5} style: two disjoint minimal subfamilies
    sets = [0b0011, 0b0101, 0b0110, 0b1000 | 0b0001]
    got = minimal_critical_subfamilies(sets, 2)
    assert got == sorted(got)
    for s in got:
        acc = -1
        for i in s:
            acc &= sets[i]
        assert acc == 0


def brute_minimal(sets, floor):
    from itertools import combinations

    out = []
    for size in range(floor, len(sets) + 1):
        for S in combinations(range(len(sets)), size):
            def meet(idx):
                acc = -1
                for i in idx:
                    acc &= sets[i]
                return acc

            if meet(S) == 0 and all(meet([i for i in S if i != s]) for s in S):
                out.append(S)
    return sorted(out)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, (1 << 7) - 1), min_size=2, max_size=7), st.integers(2, 4))
def test_minimal_subfamilies_match_brute_force(sets, floor):
    assert minimal_critical_subfamilies(sets, floor) == brute_minimal(sets, floor)


@settings(max_examples=300, deadline=None)
@given(st.integers(4, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n), st.integers(0, 10**6))))
def test_random_critical_mechanics(args):
    n, ell, seed = args
    fam = random_critical_family(n, ell, seed)
    try:
        d = run_decomposition(fam, Policy(min_stage_size=2), mechanics=True)
    except KernelChoiceImpossible:  # pragma: no cover - would be a bug
        pytest.fail("kernel choice impossible on a property-(i) family")
    checks = verify_observations(d)
    assert all(c.ok for c in checks[:3])
    assert structural_invariants(d) == []
    for a, b in zip(d.stages, d.stages[1:]):
        assert set(b.members) <= set(a.members)


def test_last_rule_runs(rules_family):
    d = run_decomposition(rules_family, Policy(subfamily_rule="last"), mechanics=True)
    assert structural_invariants(d) == []


@pytest.mark.parametrize("kw", [{"min_stage_size": 1}, {"subfamily_rule": "random"}, {"kernel_rule": "largest"}])
def test_policy_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        Policy(**kw)
