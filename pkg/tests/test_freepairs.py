import random
from itertools import combinations
from math import ceil

import pytest
from hypothesis import given, settings, strategies as st

from setpairs.decomposition import run_decomposition
from setpairs.errors import NotAForest
from setpairs.freepairs import (
    KernelDigraph,
    build_digraph,
    forest_mis,
    max_independent_set_forest,
    topological_order,
    verify_digraph,
)
from setpairs.privatepairs import select_private_pairs
from setpairs.setsystem import validate_nm_system


def random_forest(rng, size):
    edges = []
    for v in range(1, size):
        if rng.random() < 0.8:
            edges.append((rng.randrange(v), v))
    return list(range(size)), edges


def brute_mis(vertices, edges):
    for r in range(len(vertices), -1, -1):
        for S in combinations(vertices, r):
            s = set(S)
            if not any(a in s and b in s for a, b in edges):
                return list(S)
    return []


def test_oracle_on_seeded_forests():
    rng = random.Random(2024)
    for _ in range(500):
        vs, es = random_forest(rng, rng.randint(0, 18))
        got = forest_mis(vs, es)
        best = brute_mis(vs, es)
        assert len(got) == len(best)
        # lexicographic order of combinations makes brute force pick the same set
        assert got == best
        assert 2 * len(got) >= len(vs)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 14), st.randoms(use_true_random=False))
def test_mis_is_independent_and_maximum(size, rnd):
    vs, es = random_forest(rnd, size)
    got = set(forest_mis(vs, es))
    assert not any(a in got and b in got for a, b in es)
    assert len(got) == len(brute_mis(vs, es))
    assert len(got) >= ceil(size / 2)


@pytest.mark.parametrize(
    "edges",
    [[(0, 1), (1, 2), (2, 0)], [(0, 0)], [(0, 1), (1, 0)]],
)
def test_not_a_forest(edges):
    with pytest.raises(NotAForest):
        forest_mis([0, 1, 2], edges)


def test_sp7_digraph_has_no_arcs(sp7):
    d = run_decomposition(validate_nm_system(sp7))
    g = build_digraph(select_private_pairs(d), d)
    assert g.arcs == ()
    assert len(g.vertices) == 4
    assert all(c.ok for c in verify_digraph(g, d))
    assert max_independent_set_forest(g).F == g.vertices


def test_forged_two_cycle_is_reported(sp7):
    d = run_decomposition(validate_nm_system(sp7))
    forged = KernelDigraph(((0, 0), (1, 0)), (((0, 0), (1, 0)), ((1, 0), (0, 0))))
    checks = {c.name: c for c in verify_digraph(forged, d)}
    assert checks["digraph.acyclic"].status == "fail"
    assert sorted(map(tuple, checks["digraph.acyclic"].witness["cycle"])) == [(1, 0), (2, 0)]
    with pytest.raises(NotAForest):
        topological_order(forged)


def test_out_degree_violation_reported(sp7):
    d = run_decomposition(validate_nm_system(sp7))
    forged = KernelDigraph(((0, 0), (1, 0), (2, 0)), (((0, 0), (1, 0)), ((0, 0), (2, 0))))
    checks = {c.name: c.status for c in verify_digraph(forged, d)}
    assert checks["digraph.out_degree"] == "fail"
    assert checks["digraph.acyclic"] == "pass"


def test_topological_order_on_chain():
    g = KernelDigraph(((0, 0), (1, 0), (2, 1)), (((0, 0), (2, 1)), ((2, 1), (1, 0))))
    assert topological_order(g) == [(0, 0), (2, 1), (1, 0)]
