"""Canonical forms of set families under vertex relabelling.

The canonical form is the lexicographically smallest sorted tuple of set
masks over all labellings produced by individualization-refinement: colour
refinement on the vertex/set incidence structure, then branching on each
vertex of the first non-singleton cell. The leaf set is permutation
equivariant, so two families get the same form iff they are isomorphic.
"""

from __future__ import annotations

from typing import Sequence

from . import _bits


def _refine(colors: list[int], sets: Sequence[int], n: int) -> list[int]:
    while True:
        set_sig = [tuple(sorted(colors[v] for v in _bits.bits(s))) for s in sets]
        sig = [
            (colors[v], tuple(sorted(set_sig[i] for i, s in enumerate(sets) if s >> v & 1)))
            for v in range(n)
        ]
        ranks = {key: r for r, key in enumerate(sorted(set(sig)))}
        new = [ranks[sig[v]] for v in range(n)]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _image(sets: Sequence[int], labelling: Sequence[int]) -> tuple[int, ...]:
    out = []
    for s in sets:
        img = 0
        for v in _bits.bits(s):
            img |= 1 << labelling[v]
        out.append(img)
    return tuple(sorted(out))


def canonical_form(sets: Sequence[int], n: int) -> tuple[int, ...]:
    best: tuple[int, ...] | None = None

    def search(colors: list[int]) -> None:
        nonlocal best
        colors = _refine(colors, sets, n)
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min((c for c, k in counts.items() if k > 1), default=None)
        if target is None:
            img = _image(sets, colors)
            if best is None or img < best:
                best = img
            return
        for v in range(n):
            if colors[v] == target:
                # individualized vertex sorts before the rest of its cell
                split = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(colors)]
                search(split)

    search([0] * n)
    return best


def brute_canonical_form(sets: Sequence[int], n: int) -> tuple[int, ...]:
    """Minimum image over all n! labellings; reference for tests only."""
    from itertools import permutations

    return min(_image(sets, perm) for perm in permutations(range(n)))
