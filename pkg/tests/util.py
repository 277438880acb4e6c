"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from polyatree.treecore import Permutation, RootedTree, build_tree

# 25-vertex invariant tree used across modules: root 1 with a rigid part on
# the fixed points {1,2,3,4} and hanging cycles (5,6)(7,8)(9,10)(11,12,13)
# (14..19)(20..25)
TREE25_PARENTS = [0, 4, 4, 1, 4, 4, 6, 5, 1, 1,
                  2, 2, 2, 10, 9, 10, 9, 10, 9, 18,
                  19, 14, 15, 16, 17]
SIGMA25_CYCLES = [(5, 6), (7, 8), (9, 10), (11, 12, 13),
                  (14, 15, 16, 17, 18, 19), (20, 21, 22, 23, 24, 25)]


def tree25() -> RootedTree:
    return build_tree(TREE25_PARENTS)


def sigma25() -> Permutation:
    return Permutation.from_cycles(25, SIGMA25_CYCLES)


def random_tree(n: int, rng: np.random.Generator) -> RootedTree:
    """Random tree rooted at 1 (attachment model; NOT uniform, fine for
    round-trip and identity checks)."""
    parent = [0] * n
    for v in range(2, n + 1):
        parent[v - 1] = int(rng.integers(1, v))
    return build_tree(parent)


def random_perm_fixing_1(n: int, rng: np.random.Generator) -> Permutation:
    rest = (2 + rng.permutation(n - 1)).tolist() if n > 1 else []
    return Permutation.from_image([1] + rest)


def brute_orbits(t: RootedTree, auts) -> list:
    """Orbit partition from an explicit automorphism list: canonical form
    is the sorted list of sorted orbits."""
    n = t.n
    reach = {v: {v} for v in range(1, n + 1)}
    for s in auts:
        for v in range(1, n + 1):
            reach[v].add(s.image[v])
    # close transitively (automorphism groups are closed, but be safe)
    changed = True
    while changed:
        changed = False
        for v in range(1, n + 1):
            merged = set(reach[v])
            for w in list(reach[v]):
                merged |= reach[w]
            if merged != reach[v]:
                reach[v] = merged
                changed = True
    return sorted({tuple(sorted(c)) for c in reach.values()})


def partition_classes(p) -> list:
    return sorted(tuple(c) for c in p.classes())
