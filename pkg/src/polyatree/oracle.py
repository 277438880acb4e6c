"""Brute-force reference implementations, deliberately naive.

These back the ground-truth side of the test suite and `validate`:
exhaustive enumeration of small labeled trees, invariant trees,
automorphisms and commuting functions, plus discretized Brownian
excursions for the scaling-limit comparisons.  Hard size caps keep
accidental exponential blowups out of CI.
"""

from __future__ import annotations

import math
from itertools import permutations, product

import numpy as np

from .prufer import cayley_decode
from .treecore import Permutation, RootedTree, is_invariant

__all__ = [
    "enumerate_trees",
    "enumerate_invariant_trees",
    "enumerate_automorphisms",
    "enumerate_commuting_functions",
    "random_walk_excursion",
    "excursion_functionals",
    "MAX_TREE_N",
    "MAX_FUNC_N",
]

MAX_TREE_N = 8
MAX_FUNC_N = 5

# Lattice corrections for excursion functionals: the expected maximum of a
# nonnegative simple-walk excursion of N steps is sqrt(pi*N/2) - 3/2 + o(1)
# and the expected area is sqrt(pi/8)*N^(3/2) - N + o(N), so adding the
# constants removes the leading O(1/sqrt(N)) bias of the scaled values.
MAX_LATTICE_SHIFT = 1.5
AREA_LATTICE_SHIFT = 1.0


def enumerate_trees(n: int):
    """All n^(n-2) labeled trees on {1..n} rooted at 1, without duplicates."""
    if n > MAX_TREE_N:
        raise ValueError(f"enumerate_trees capped at n <= {MAX_TREE_N}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n <= 2:
        yield cayley_decode([], n)
        return
    for code in product(range(1, n + 1), repeat=n - 2):
        yield cayley_decode(code, n)


def enumerate_invariant_trees(s: Permutation):
    """All trees rooted at 1 invariant under s (n <= 8)."""
    for t in enumerate_trees(s.n):
        if is_invariant(t, s):
            yield t


def enumerate_automorphisms(t: RootedTree):
    """All automorphisms of t, by filtering the (n-1)! permutations
    fixing 1 (n <= 8)."""
    if t.n > MAX_TREE_N:
        raise ValueError(f"enumerate_automorphisms capped at n <= {MAX_TREE_N}")
    out = []
    for rest in permutations(range(2, t.n + 1)):
        s = Permutation.from_image([1] + list(rest))
        if is_invariant(t, s):
            out.append(s)
    return out


def enumerate_commuting_functions(s: Permutation):
    """All maps f: [n] -> [n] with f(s(x)) = s(f(x)), as padded image
    tuples (n <= 5)."""
    n = s.n
    if n > MAX_FUNC_N:
        raise ValueError(f"enumerate_commuting_functions capped at "
                         f"n <= {MAX_FUNC_N}")
    img = s.image
    out = []
    for f in product(range(1, n + 1), repeat=n):
        ok = True
        for x in range(1, n + 1):
            if f[img[x] - 1] != img[f[x - 1]]:
                ok = False
                break
        if ok:
            out.append((0,) + f)
    return out


# --------------------------------------------------------------------------
# discretized Brownian excursions
# --------------------------------------------------------------------------

def _excursion_batch(steps: int, paths: int, rng: np.random.Generator):
    """Uniform nonnegative +-1 excursions of length ``steps`` (even).

    Cycle-lemma construction: shuffle m up-steps and m+1 down-steps; among
    the 2m+1 rotations of the resulting bridge-to-minus-one exactly one is
    a first-passage path, namely the rotation starting just after the first
    minimum; dropping its final step leaves a uniform excursion.  A
    rejection construction draws the same law but needs Theta(steps)
    attempts per path, which is hopeless at the scales used here.

    Returns the (paths, steps+1) int32 array of heights S_0..S_steps.
    """
    if steps < 100 or steps % 2:
        raise ValueError("steps must be even and >= 100")
    m = steps // 2
    length = 2 * m + 1
    walk = np.empty((paths, length), dtype=np.int8)
    walk[:, :m] = 1
    walk[:, m:] = -1
    walk = rng.permuted(walk, axis=1)
    partial = np.cumsum(walk, axis=1, dtype=np.int32)
    first_min = np.argmin(partial, axis=1)
    cols = (np.arange(length)[None, :] + first_min[:, None] + 1) % length
    rotated = np.take_along_axis(walk, cols, axis=1)
    heights = np.zeros((paths, steps + 1), dtype=np.int32)
    np.cumsum(rotated[:, :-1], axis=1, dtype=np.int32, out=heights[:, 1:])
    return heights


def random_walk_excursion(steps: int, rng: np.random.Generator) -> np.ndarray:
    """One nonnegative lattice excursion scaled by 1/sqrt(steps): an array
    of steps+1 heights starting and ending at 0."""
    heights = _excursion_batch(steps, 1, rng)[0]
    return heights / math.sqrt(steps)


def excursion_functionals(steps: int, paths: int, rng: np.random.Generator,
                          chunk: int = 2000):
    """Scaled, lattice-corrected (max, area) samples over many excursions.

    max is (discrete max + 3/2)/sqrt(N) and area is
    (sum of heights + N)/N^(3/2); see the module constants for why.
    Returns two float arrays of length ``paths``.
    """
    mx = np.empty(paths)
    area = np.empty(paths)
    done = 0
    root_n = math.sqrt(steps)
    while done < paths:
        count = min(chunk, paths - done)
        heights = _excursion_batch(steps, count, rng)
        mx[done:done + count] = (heights.max(axis=1) + MAX_LATTICE_SHIFT) / root_n
        area[done:done + count] = ((heights.sum(axis=1, dtype=np.int64)
                                    + AREA_LATTICE_SHIFT * steps)
                                   / steps ** 1.5)
        done += count
    return mx, area
