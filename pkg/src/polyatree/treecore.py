"""Rooted forests on {1..n}, permutations, canonical forms and automorphisms.

Storage layout
--------------
A forest on vertices 1..n is held in three parallel integer tuples of
length n+1 (index 0 is unused):

    parent[v]    parent of v, 0 for roots
    firstborn[v] smallest child of v, 0 for leaves
    nextsib[v]   next-larger sibling of v, 0 for the last sibling

Child chains are always in increasing vertex order, so traversals are
deterministic.  Graph libraries with per-node allocation are far too slow
for the million-vertex trees this package targets; three flat lists are not.

A *tree* is a forest whose single root is vertex 1.  Functions that require
a tree say so.

Canonical form
--------------
``ahu_canonical`` assigns every vertex an integer "i-number" level by level
from the deepest level upward: leaves get 0, and the distinct sorted lists
of child i-numbers on a level are ranked lexicographically from 1.  Two
trees are isomorphic (as rooted unlabeled trees) exactly when their
``root_code`` values are equal.  Vertex orbits of the automorphism group
follow from the i-numbers: v and w are in the same orbit iff the i-number
lists along their root paths coincide, which lets the partition be computed
in one more sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

__all__ = [
    "RootedForest",
    "RootedTree",
    "Permutation",
    "CycleIndex",
    "CanonicalCode",
    "AutomorphismPartition",
    "build_tree",
    "ahu_canonical",
    "automorphism_partition",
    "log_aut_size",
    "aut_size_exact",
    "is_invariant",
    "quotient",
]

_EXACT_AUT_MAX_N = 10_000


def _chains_from_parent(parent: list) -> tuple:
    """Build firstborn/nextsib chains (children in increasing order).

    ``parent`` is padded (length n+1, entry 0 unused).
    """
    n = len(parent) - 1
    firstborn = [0] * (n + 1)
    nextsib = [0] * (n + 1)
    for v in range(n, 0, -1):
        p = parent[v]
        if p:
            nextsib[v] = firstborn[p]
            firstborn[p] = v
    return firstborn, nextsib


class RootedForest:
    """Immutable forest on {1..n}; see module docstring for the layout."""

    __slots__ = ("n", "parent", "firstborn", "nextsib")

    def __init__(self, parent: Sequence[int], firstborn: Sequence[int],
                 nextsib: Sequence[int]):
        self.n = len(parent) - 1
        self.parent = tuple(parent)
        self.firstborn = tuple(firstborn)
        self.nextsib = tuple(nextsib)

    @classmethod
    def from_parent_list(cls, values: Sequence[int]) -> "RootedForest":
        """Build a forest from external form: values[i] is the parent of
        vertex i+1, 0 marking roots.  Validates acyclicity and ranges."""
        n = len(values)
        parent = [0] * (n + 1)
        for i, p in enumerate(values):
            p = int(p)
            if p < 0 or p > n:
                raise ValueError(f"parent of vertex {i + 1} out of range: {p}")
            parent[i + 1] = p
        forest = cls._from_padded_unchecked(parent)
        forest._check_acyclic()
        return forest

    @classmethod
    def _from_padded_unchecked(cls, parent: list) -> "RootedForest":
        firstborn, nextsib = _chains_from_parent(parent)
        return cls(parent, firstborn, nextsib)

    def _check_acyclic(self) -> None:
        # every vertex must be reachable from a root through child chains
        seen = 0
        stack = list(self.roots())
        firstborn, nextsib = self.firstborn, self.nextsib
        while stack:
            v = stack.pop()
            seen += 1
            c = firstborn[v]
            while c:
                stack.append(c)
                c = nextsib[c]
        if seen != self.n:
            raise ValueError("cycle detected: parent structure is not a forest")

    def roots(self) -> list:
        return [v for v in range(1, self.n + 1) if self.parent[v] == 0]

    def children(self, v: int) -> Iterator[int]:
        c = self.firstborn[v]
        while c:
            yield c
            c = self.nextsib[c]

    def is_tree(self) -> bool:
        """True when the single root is vertex 1."""
        return self.parent[1] == 0 and all(
            self.parent[v] != 0 for v in range(2, self.n + 1))

    def to_parent_list(self) -> list:
        """External form: length-n list, entry i is the parent of i+1."""
        return list(self.parent[1:])

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedForest) and self.parent == other.parent

    def __hash__(self) -> int:
        return hash(self.parent)

    def __repr__(self) -> str:
        if self.n <= 16:
            return f"RootedForest({self.to_parent_list()})"
        return f"RootedForest(n={self.n})"


# A RootedTree is a RootedForest whose single root is vertex 1.
RootedTree = RootedForest


def build_tree(parent: Sequence[int]) -> RootedTree:
    """Build a rooted tree from a parent list (external form, root = vertex 1).

    Raises ValueError on a cycle, on multiple roots, or when the root is
    not vertex 1.
    """
    n = len(parent)
    if n == 0:
        raise ValueError("empty parent list")
    if int(parent[0]) != 0:
        raise ValueError("root not vertex 1 (parent of vertex 1 must be 0)")
    for i in range(1, n):
        if int(parent[i]) == 0:
            raise ValueError(f"multiple roots: vertex {i + 1} also has parent 0")
    return RootedForest.from_parent_list(parent)


# --------------------------------------------------------------------------
# permutations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CycleIndex:
    """Cycle-type data of a permutation of {1..n}.

    ``lam[d]`` counts d-cycles; ``mu[d]`` = sum of e*lam[e] over proper
    divisors e of d (e | d, e < d), the number of points whose period
    strictly divides d.  mu[1] is always 0.
    """

    n: int
    lam: dict
    mu: dict

    @classmethod
    def from_lambda(cls, n: int, lam: dict) -> "CycleIndex":
        if sum(d * c for d, c in lam.items()) != n:
            raise ValueError("cycle lengths do not sum to n")
        mu = {}
        for d in lam:
            mu[d] = sum(e * lam[e] for e in lam if e < d and d % e == 0)
        return cls(n=n, lam=dict(lam), mu=mu)


class Permutation:
    """Permutation of {1..n} with its cycle decomposition cached.

    ``image`` is padded like forest arrays (image[0] = 0).  ``cycles`` are
    sorted by (length, minimum element) and each is listed starting from its
    minimum, following the permutation.
    """

    __slots__ = ("n", "image", "cycles", "cycle_type")

    def __init__(self, image_padded: Sequence[int]):
        n = len(image_padded) - 1
        img = tuple(image_padded)
        if img[0] != 0:
            raise ValueError("padded image must have image[0] == 0")
        if sorted(img[1:]) != list(range(1, n + 1)):
            raise ValueError("image is not a bijection of 1..n")
        self.n = n
        self.image = img
        self.cycles = self._decompose()
        lam: dict = {}
        for c in self.cycles:
            lam[len(c)] = lam.get(len(c), 0) + 1
        self.cycle_type = CycleIndex.from_lambda(n, lam)

    def _decompose(self) -> tuple:
        img = self.image
        seen = [False] * (self.n + 1)
        cycles = []
        for v in range(1, self.n + 1):
            if seen[v]:
                continue
            cyc = [v]
            seen[v] = True
            w = img[v]
            while w != v:
                cyc.append(w)
                seen[w] = True
                w = img[w]
            cycles.append(tuple(cyc))
        cycles.sort(key=lambda c: (len(c), c[0]))
        return tuple(cycles)

    @classmethod
    def _from_padded_unchecked(cls, image_padded: Sequence[int]) -> "Permutation":
        # trusted constructor for internally built bijections: skips the
        # O(n log n) bijection check, which matters on the sampling hot path
        self = object.__new__(cls)
        n = len(image_padded) - 1
        self.n = n
        self.image = tuple(image_padded)
        self.cycles = self._decompose()
        lam: dict = {}
        for c in self.cycles:
            lam[len(c)] = lam.get(len(c), 0) + 1
        self.cycle_type = CycleIndex.from_lambda(n, lam)
        return self

    @classmethod
    def from_image(cls, values: Sequence[int]) -> "Permutation":
        """External form: values[i] = image of vertex i+1."""
        return cls([0] + [int(v) for v in values])

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(list(range(n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        img = list(range(n + 1))
        touched = set()
        for cyc in cycles:
            if len(set(cyc)) != len(cyc):
                raise ValueError(f"repeated element in cycle {cyc}")
            for v in cyc:
                if not 1 <= v <= n:
                    raise ValueError(f"cycle element {v} out of range 1..{n}")
                if v in touched:
                    raise ValueError(f"element {v} appears in two cycles")
                touched.add(v)
            for i, v in enumerate(cyc):
                img[v] = cyc[(i + 1) % len(cyc)]
        return cls(img)

    def __call__(self, v: int) -> int:
        return self.image[v]

    def fixes(self, v: int) -> bool:
        return self.image[v] == v

    def is_identity(self) -> bool:
        return all(self.image[v] == v for v in range(1, self.n + 1))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.image == other.image

    def __hash__(self) -> int:
        return hash(self.image)

    def __repr__(self) -> str:
        parts = ["(" + ",".join(map(str, c)) + ")" for c in self.cycles if len(c) > 1]
        return "Permutation(" + ("".join(parts) or "id") + f", n={self.n})"


# --------------------------------------------------------------------------
# traversal and i-numbers
# --------------------------------------------------------------------------

class TreeAnalysis(NamedTuple):
    """One-pass per-tree data shared by the canonical-form consumers."""

    order: list       # preorder, children visited in increasing vertex order
    depth: list       # padded; depth[root] = 0
    inum: list        # padded; leaves 0, equal subtrees share an id
    orbit: list       # padded; dense orbit ids in preorder first-visit order
    log_aut: float    # natural log of the automorphism group size
    rigid: list       # padded; True where the subtree has trivial Aut


def _preorder_depth(t: RootedTree) -> tuple:
    """Preorder list (children ascending) and padded depth array."""
    parent, firstborn, nextsib = t.parent, t.firstborn, t.nextsib
    n = t.n
    order = []
    append = order.append
    depth = [0] * (n + 1)
    v = 1
    while v:
        append(v)
        c = firstborn[v]
        if c:
            depth[c] = depth[v] + 1
            v = c
            continue
        while v:
            s = nextsib[v]
            if s:
                depth[s] = depth[v]
                v = s
                break
            v = parent[v]
    if len(order) != n:
        raise ValueError("not a tree rooted at 1")
    return order, depth


def _analyze(t: RootedTree) -> TreeAnalysis:
    """i-numbers, orbit partition and log|Aut| in two sweeps.

    The i-number ids produced here are dense hashes valid within this tree
    only; they induce the same partition as the sorted canonical i-numbers
    but skip the per-level sorting, which matters on the sampling hot path.
    """
    order, depth = _preorder_depth(t)
    n = t.n
    firstborn, nextsib = t.firstborn, t.nextsib
    inum = [0] * (n + 1)
    rigid = [True] * (n + 1)
    ids: dict = {}
    next_id = 1
    log_aut = 0.0
    lgamma = math.lgamma
    for i in range(n - 1, -1, -1):          # children before parents
        v = order[i]
        c = firstborn[v]
        if not c:
            continue
        key = []
        sub_rigid = True
        while c:
            key.append(inum[c])
            sub_rigid = sub_rigid and rigid[c]
            c = nextsib[c]
        key.sort()
        # multiplicities of identical child subtrees -> log of product of
        # factorials, the symmetric part of Aut
        run = 1
        for j in range(1, len(key)):
            if key[j] == key[j - 1]:
                run += 1
            else:
                if run > 1:
                    log_aut += lgamma(run + 1)
                    sub_rigid = False
                run = 1
        if run > 1:
            log_aut += lgamma(run + 1)
            sub_rigid = False
        rigid[v] = sub_rigid
        tkey = tuple(key)
        got = ids.get(tkey)
        if got is None:
            ids[tkey] = got = next_id
            next_id += 1
        inum[v] = got

    # orbit of v is determined by (orbit of parent, inum of v)
    orbit = [0] * (n + 1)
    parent = t.parent
    omap: dict = {}
    next_orbit = 0
    for v in order:
        key = (orbit[parent[v]] if parent[v] else -1, inum[v])
        got = omap.get(key)
        if got is None:
            omap[key] = got = next_orbit
            next_orbit += 1
        orbit[v] = got
    return TreeAnalysis(order, depth, inum, orbit, log_aut, rigid)


# --------------------------------------------------------------------------
# canonical form
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalCode:
    """Canonical form of a rooted tree.

    ``inumber`` is padded (entry 0 unused): leaves carry 0 and on each depth
    level the distinct sorted child-i-number lists are ranked from 1 in
    lexicographic order.  ``root_code`` is the depth sequence of the
    canonically ordered preorder traversal; two rooted trees are isomorphic
    iff their root_code values are equal.
    """

    n: int
    inumber: tuple
    root_code: tuple


def ahu_canonical(t: RootedTree) -> CanonicalCode:
    """Canonical i-numbers and isomorphism code of a rooted tree."""
    order, depth = _preorder_depth(t)
    n = t.n
    firstborn, nextsib = t.firstborn, t.nextsib
    height = max(depth[v] for v in order) if n else 0
    levels: list = [[] for _ in range(height + 1)]
    for v in order:
        levels[depth[v]].append(v)

    inum = [0] * (n + 1)
    for lev in range(height, -1, -1):
        keyed = []
        for v in levels[lev]:
            c = firstborn[v]
            if not c:
                continue        # leaf keeps i-number 0 on every level
            key = []
            while c:
                key.append(inum[c])
                c = nextsib[c]
            key.sort()
            keyed.append((tuple(key), v))
        if not keyed:
            continue
        keyed.sort(key=lambda kv: kv[0])
        rank = 0
        prev = None
        for key, v in keyed:
            if key != prev:
                rank += 1
                prev = key
            inum[v] = rank

    # canonical preorder: children visited by increasing i-number (ties are
    # isomorphic subtrees, so any tie order yields the same code)
    code = []
    stack = [(1, 0)]
    while stack:
        v, d = stack.pop()
        code.append(d)
        kids = []
        c = firstborn[v]
        while c:
            kids.append(c)
            c = nextsib[c]
        kids.sort(key=inum.__getitem__, reverse=True)
        for c in kids:
            stack.append((c, d + 1))
    return CanonicalCode(n=n, inumber=tuple(inum), root_code=tuple(code))


@dataclass(frozen=True)
class AutomorphismPartition:
    """Vertex partition into orbits of the automorphism group.

    ``orbit`` is padded; ids are dense integers in preorder first-visit
    order, so seeded runs are reproducible.  ``rigid``, when present,
    flags vertices whose subtree has a trivial automorphism group; it is
    derived data used to prune random-automorphism drawing.
    """

    n: int
    orbit: tuple
    n_orbits: int
    rigid: tuple | None = None

    def classes(self) -> list:
        out: list = [[] for _ in range(self.n_orbits)]
        for v in range(1, self.n + 1):
            out[self.orbit[v]].append(v)
        return out


def automorphism_partition(t: RootedTree) -> AutomorphismPartition:
    """Orbits of Aut(t): v ~ w iff the i-number lists on their root paths
    coincide."""
    a = _analyze(t)
    return AutomorphismPartition(n=t.n, orbit=tuple(a.orbit),
                                 n_orbits=max(a.orbit[1:]) + 1 if t.n else 0,
                                 rigid=tuple(a.rigid))


def log_aut_size(t: RootedTree) -> float:
    """Natural log of the automorphism group size.

    |Aut| is the product, over vertices, of the factorials of the
    multiplicities of identical child subtrees.  The log form is returned
    because |Aut| grows exponentially in n for typical trees.
    """
    return _analyze(t).log_aut


def aut_size_exact(t: RootedTree) -> int:
    """Exact |Aut(t)| as a big integer (n <= 10**4; use log_aut_size beyond)."""
    if t.n > _EXACT_AUT_MAX_N:
        raise ValueError(f"aut_size_exact supports n <= {_EXACT_AUT_MAX_N}")
    a = _analyze(t)
    inum, firstborn, nextsib = a.inum, t.firstborn, t.nextsib
    total = 1
    for v in a.order:
        c = firstborn[v]
        if not c:
            continue
        key = []
        while c:
            key.append(inum[c])
            c = nextsib[c]
        key.sort()
        run = 1
        for j in range(1, len(key)):
            if key[j] == key[j - 1]:
                run += 1
            else:
                total *= math.factorial(run)
                run = 1
        total *= math.factorial(run)
    return total


# --------------------------------------------------------------------------
# invariance and quotients
# --------------------------------------------------------------------------

def is_invariant(t: RootedTree, s: Permutation) -> bool:
    """True iff relabeling t by s maps its edge set onto itself."""
    if t.n != s.n:
        raise ValueError(f"size mismatch: tree on {t.n} vertices, "
                         f"permutation of {s.n}")
    parent, img = t.parent, s.image
    for v in range(1, t.n + 1):
        p = parent[v]
        if parent[img[v]] != (img[p] if p else 0):
            return False
    return True


def quotient(t: RootedTree, s: Permutation) -> RootedTree:
    """Tree induced on the cycles of s by an s-invariant tree.

    Vertex i of the result is s.cycles[i-1] (cycles sorted by length then
    minimum, so vertex 1 is the cycle {1}).  Each quotient tree lifts to
    exactly prod(cycle lengths) invariant trees.
    """
    if not is_invariant(t, s):
        raise ValueError("tree is not invariant under the permutation")
    cycles = s.cycles
    k = len(cycles)
    cyc_of = [0] * (s.n + 1)
    for i, cyc in enumerate(cycles):
        for v in cyc:
            cyc_of[v] = i + 1
    qparent = [0] * (k + 1)
    for i, cyc in enumerate(cycles):
        p = t.parent[cyc[0]]
        qparent[i + 1] = cyc_of[p] if p else 0
    return RootedForest._from_padded_unchecked(qparent)
