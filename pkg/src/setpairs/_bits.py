"""Bit-mask helpers. Vertex ``v`` (1-based label) lives at bit ``v - 1``."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator

MAX_UNIVERSE = 64


def mask_of(labels: Iterable[int]) -> int:
    mask = 0
    for v in labels:
        mask |= 1 << (v - 1)
    return mask


def labels(mask: int) -> tuple[int, ...]:
    """Sorted 1-based labels of the members of ``mask``."""
    out = []
    v = 1
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def bits(mask: int) -> Iterator[int]:
    """Yield 0-based bit positions in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def full_mask(n: int) -> int:
    return (1 << n) - 1


def subsets_of_size(mask: int, size: int) -> Iterator[int]:
    """Subsets of ``mask`` with ``size`` members, in lexicographic order of labels."""
    members = [1 << b for b in bits(mask)]
    for combo in combinations(members, size):
        yield sum(combo)


def intersect_all(masks: Iterable[int], universe: int) -> int:
    acc = universe
    for m in masks:
        acc &= m
    return acc


def lowest(mask: int) -> int:
    """0-based position of the smallest member; ``mask`` must be nonzero."""
    return (mask & -mask).bit_length() - 1
