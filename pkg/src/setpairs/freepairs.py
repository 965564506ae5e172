"""Kernel digraph, exact maximum independent set on its underlying forest,
and the resulting free pairs.

Kernel vertices are identified by ``(a, j)``, meaning the stage-``j`` kernel
vertex of set ``a`` (0-based set index).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import Hashable, Iterable, Sequence

from .decomposition import Decomposition
from .errors import NotAForest
from .privatepairs import PairLedger
from .report import FAIL, PASS, VACUOUS, Check, verdict
from .setsystem import NMSystem

Node = tuple[int, int]


@dataclass(frozen=True)
class KernelDigraph:
    vertices: tuple[Node, ...]
    arcs: tuple[tuple[Node, Node], ...]

    def out_arcs(self) -> dict[Node, list[Node]]:
        out: dict[Node, list[Node]] = {v: [] for v in self.vertices}
        for src, dst in self.arcs:
            out.setdefault(src, []).append(dst)
        return out

    def to_json(self) -> dict:
        return {
            "vertices": [[a + 1, j] for a, j in self.vertices],
            "arcs": [[[r + 1, s], [i + 1, j]] for (r, s), (i, j) in self.arcs],
        }


@dataclass(frozen=True)
class FreeMarking:
    F: tuple[Node, ...]
    free_pairs: tuple[Node, ...]

    def to_json(self) -> dict:
        return {
            "F": [[a + 1, j] for a, j in self.F],
            "free_pairs": [[i + 1, j] for i, j in self.free_pairs],
        }


def build_digraph(ledger: PairLedger, d: Decomposition) -> KernelDigraph:
    kernel_of = d.kernel_index()
    vertices = tuple(sorted(kernel_of.values()))
    arcs = []
    for (r, s), p in sorted(ledger.pairs.items()):
        target = kernel_of.get(p.non_anchor)
        if target is None:
            continue
        i, j = target
        if j == d.lifetimes[i]:
            continue
        if (i, j) == (r, s):
            raise AssertionError(f"self-loop at kernel vertex ({r + 1}, {s})")
        arcs.append(((r, s), (i, j)))
    return KernelDigraph(vertices, tuple(arcs))


def _find_directed_cycle(g: KernelDigraph) -> list[Node] | None:
    out = g.out_arcs()
    color: dict[Node, int] = {}
    for start in sorted(out):
        if start in color:
            continue
        stack = [(start, iter(out[start]))]
        path = [start]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
                continue
            state = color.get(nxt, 0)
            if state == 1:
                return path[path.index(nxt):]
            if state == 0:
                color[nxt] = 1
                stack.append((nxt, iter(out.get(nxt, []))))
                path.append(nxt)
    return None


def verify_digraph(g: KernelDigraph, d: Decomposition) -> list[Check]:
    fails = [
        {"arc": [[r + 1, s], [i + 1, j]]}
        for (r, s), (i, j) in g.arcs
        if s > j
    ]
    checks = [verdict("arcs.a", fails)]
    fails = [
        {"arc": [[r + 1, s], [i + 1, j]], "t_r": d.lifetimes[r]}
        for (r, s), (i, j) in g.arcs
        if s == j and s != d.lifetimes[r]
    ]
    checks.append(verdict("arcs.b", fails))

    out = g.out_arcs()
    fails = [{"vertex": [a + 1, j], "out_degree": len(dst)} for (a, j), dst in sorted(out.items()) if len(dst) > 1]
    fails += [{"self_loop": [a + 1, j]} for (a, j), dst in sorted(out.items()) if (a, j) in dst]
    checks.append(verdict("digraph.out_degree", fails))

    cycle = _find_directed_cycle(g)
    if cycle is None:
        checks.append(Check("digraph.acyclic", PASS))
    else:
        checks.append(Check("digraph.acyclic", FAIL, {"cycle": [[a + 1, j] for a, j in cycle]}))
    return checks


def topological_order(g: KernelDigraph) -> list[Node]:
    """Kahn order with ties broken by (stage, set index); raises on a cycle."""
    indeg = {v: 0 for v in g.vertices}
    out = g.out_arcs()
    for _src, dst in g.arcs:
        indeg[dst] = indeg.get(dst, 0) + 1
    ready = sorted((v for v, k in indeg.items() if k == 0), key=lambda v: (v[1], v[0]))
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in out.get(v, []):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
                ready.sort(key=lambda v: (v[1], v[0]))
    if len(order) != len(indeg):
        raise NotAForest("directed cycle present", _find_directed_cycle(g))
    return order


# -- maximum independent set on a forest -------------------------------------


def _adjacency(vertices: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable]]) -> dict:
    adj = {v: [] for v in vertices}
    seen = set()
    for a, b in edges:
        if a == b:
            raise NotAForest("self-loop", [a])
        key = frozenset((a, b))
        if key in seen:
            raise NotAForest("parallel edges form a 2-cycle", [a, b])
        seen.add(key)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for nbrs in adj.values():
        nbrs.sort()
    return adj


def _undirected_cycle(adj: dict) -> list | None:
    parent: dict = {}
    for root in sorted(adj):
        if root in parent:
            continue
        parent[root] = None
        stack = [root]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w == parent[v]:
                    continue
                if w in parent:
                    # climb both ends to their common ancestor
                    anc_v = [v]
                    while parent[anc_v[-1]] is not None:
                        anc_v.append(parent[anc_v[-1]])
                    anc_w = [w]
                    while anc_w[-1] not in anc_v:
                        anc_w.append(parent[anc_w[-1]])
                    meet = anc_w[-1]
                    return anc_v[: anc_v.index(meet) + 1] + anc_w[-2::-1]
                parent[w] = v
                stack.append(w)
    return None


def _forest_mis_size(adj: dict, forced: dict) -> int:
    """Tree DP. ``forced[v]`` is True (must take), False (must skip) or absent."""
    NEG = float("-inf")
    visited = set()
    total = 0
    for root in sorted(adj):
        if root in visited:
            continue
        order, parent = [], {root: None}
        stack = [root]
        visited.add(root)
        while stack:
            v = stack.pop()
            order.append(v)
            for w in adj[v]:
                if w not in visited:
                    visited.add(w)
                    parent[w] = v
                    stack.append(w)
        take, skip = {}, {}
        for v in reversed(order):
            t, s = 1, 0
            for w in adj[v]:
                if parent.get(w) == v:
                    t += skip[w]
                    s += max(take[w], skip[w])
            if forced.get(v) is False:
                t = NEG
            if forced.get(v) is True:
                s = NEG
            take[v], skip[v] = t, s
        total += max(take[root], skip[root])
    return total


def forest_mis(vertices: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable]]) -> list:
    """Exact maximum independent set of a forest, lexicographically smallest
    (by sorted vertex list) among all maximum ones."""
    adj = _adjacency(vertices, edges)
    cycle = _undirected_cycle(adj)
    if cycle is not None:
        raise NotAForest("underlying graph has a cycle", cycle)
    best = _forest_mis_size(adj, {})
    forced: dict = {}
    for v in sorted(adj):
        if any(forced.get(w) is True for w in adj[v]):
            forced[v] = False
            continue
        forced[v] = True
        if _forest_mis_size(adj, forced) != best:
            forced[v] = False
    chosen = sorted(v for v, take in forced.items() if take)
    assert len(chosen) == best
    return chosen


def max_independent_set_forest(g: KernelDigraph) -> FreeMarking:
    F = forest_mis(g.vertices, g.arcs)
    if 2 * len(F) < len(g.vertices):
        raise AssertionError(f"|F|={len(F)} below half of {len(g.vertices)} kernel vertices")
    return FreeMarking(tuple(F), tuple(sorted(F)))


def count_free(marking: FreeMarking, system: NMSystem) -> Check:
    n, m = system.n, system.m
    h = len(marking.free_pairs)
    if n <= 3 * m:
        return Check("free.count", VACUOUS)
    if 2 * h >= n - 3 * m:
        return Check("free.count", PASS)
    return Check("free.count", FAIL, {"free": h, "floor": f"({n}-{3 * m})/2"})


def half_floor_check(marking: FreeMarking, g: KernelDigraph) -> Check:
    need = ceil(len(g.vertices) / 2)
    if len(marking.F) >= need:
        return Check("free.half", PASS)
    return Check("free.half", FAIL, {"F": len(marking.F), "needed": need})


def independence_check(marking: FreeMarking, g: KernelDigraph) -> Check:
    chosen = set(marking.F)
    bad = [[[r + 1, s], [i + 1, j]] for (r, s), (i, j) in g.arcs if (r, s) in chosen and (i, j) in chosen]
    return verdict("free.independent", bad)
