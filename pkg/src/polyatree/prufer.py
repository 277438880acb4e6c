"""Prüfer-style bijections for rooted trees and forests.

Three encodings live here, all driven by the same lowest-leaf removal loop:

* classical codes: trees on {1..n} rooted at 1  <->  sequences in [n]^(n-2);
* decorated sequences: forests on {1..m} carrying a label on every edge
  (from a set X) and a label on every root (from a set Y)  <->  sequences in
  ([m] x X  u  {0} x Y)^m whose last entry is a root entry, which counts
  such forests as (m|X| + |Y|)^(m-1) * |Y|;
* sigma-Prüfer sequences: trees invariant under a permutation sigma fixing
  1  <->  blocked integer sequences, one block per cycle length d, whose
  entries lie among the points of period dividing d and whose last entry
  per block has period strictly dividing d.

The leaf extraction is the linear "pointer" variant of the usual heap: a
scan pointer walks the vertices in increasing order and a vertex whose
count drops to zero below the pointer is used immediately, which visits
leaves in exactly lowest-first order without a priority queue.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .treecore import (Permutation, RootedForest, RootedTree, is_invariant,
                       _chains_from_parent)

__all__ = [
    "DecoratedForest",
    "SigmaPruferSeq",
    "cayley_decode",
    "cayley_encode",
    "sample_cayley",
    "prufer_decode_decorated",
    "prufer_encode_decorated",
    "sigma_prufer_encode",
    "sigma_prufer_decode",
    "sigma_prufer_encode_forest",
    "sigma_prufer_decode_forest",
]


# --------------------------------------------------------------------------
# rooted classical codes
# --------------------------------------------------------------------------

def _decode_rooted(entries: Sequence[int], m: int) -> list:
    """Padded parent list of the tree on [m] rooted at 1 whose removal
    record is ``entries`` (length m-1; entry t is the parent of the t-th
    removed lowest leaf; vertex 1 never counts as a leaf)."""
    parent = [0] * (m + 1)
    if m <= 1:
        return parent
    cnt = [0] * (m + 1)
    for a in entries:
        cnt[a] += 1
    ptr = 2
    while cnt[ptr]:
        ptr += 1
    leaf = ptr
    for a in entries:
        parent[leaf] = a
        cnt[a] -= 1
        if cnt[a] == 0 and 1 < a < ptr:
            leaf = a
        else:
            ptr += 1
            while ptr <= m and cnt[ptr]:
                ptr += 1
            leaf = ptr
    return parent


def _encode_rooted(t: RootedTree) -> list:
    """Inverse of _decode_rooted: remove the lowest non-root leaf m-1 times,
    recording its parent.  The last record is always 1."""
    m = t.n
    parent = t.parent
    cnt = [0] * (m + 1)
    for v in range(2, m + 1):
        cnt[parent[v]] += 1
    out = []
    if m == 1:
        return out
    ptr = 2
    while cnt[ptr]:
        ptr += 1
    leaf = ptr
    for _ in range(m - 1):
        p = parent[leaf]
        out.append(p)
        cnt[p] -= 1
        if cnt[p] == 0 and 1 < p < ptr:
            leaf = p
        else:
            ptr += 1
            while ptr <= m and cnt[ptr]:
                ptr += 1
            leaf = ptr
    return out


def cayley_decode(code: Sequence[int], n: int | None = None) -> RootedTree:
    """Tree on {1..n} rooted at 1 with classical code ``code``.

    ``n`` defaults to len(code)+2; pass n=1 explicitly for the one-vertex
    tree (the code is empty for both n=1 and n=2).
    """
    if n is None:
        n = len(code) + 2
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(code) != max(n - 2, 0):
        raise ValueError(f"code length {len(code)} does not match n={n}")
    entries = [int(a) for a in code]
    for a in entries:
        if not 1 <= a <= n:
            raise ValueError(f"code entry {a} out of range 1..{n}")
    entries.append(1)                      # final leaf always joins the root
    if n == 1:
        entries = []
    parent = _decode_rooted(entries, n)
    return RootedForest._from_padded_unchecked(parent)


def cayley_encode(t: RootedTree) -> list:
    """Classical code of a tree rooted at 1 (length n-2)."""
    rec = _encode_rooted(t)
    return rec[:-1] if rec else []


def sample_cayley(n: int, rng) -> RootedTree:
    """Uniform tree on {1..n} rooted at 1 (one of n^(n-2))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n <= 2:
        return cayley_decode([], n)
    code = rng.integers(1, n + 1, size=n - 2).tolist()
    return cayley_decode(code, n)


# --------------------------------------------------------------------------
# decorated sequences (forests with edge and root labels)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DecoratedForest:
    """Forest on {1..m} with one label per edge and one per root.

    ``edge_label`` maps each non-root vertex to the label of the edge
    joining it to its parent; ``root_label`` maps each root to its label.
    """

    forest: RootedForest
    edge_label: dict
    root_label: dict

    def _check(self) -> None:
        roots = set(self.forest.roots())
        nonroots = set(range(1, self.forest.n + 1)) - roots
        if set(self.edge_label) != nonroots:
            raise ValueError("edge labels must cover exactly the non-roots")
        if set(self.root_label) != roots:
            raise ValueError("root labels must cover exactly the roots")


def _decode_decorated_core(firstcoords: Sequence[int], m: int) -> tuple:
    """Pointer decode over a forest: returns (pop_order, padded parent list).

    firstcoords[t] > 0 makes the t-th popped leaf a child of that vertex;
    0 makes it a root.  Every sequence whose last coordinate is 0 is valid.
    """
    parent = [0] * (m + 1)
    cnt = [0] * (m + 1)
    for a in firstcoords:
        if a:
            cnt[a] += 1
    order = []
    ptr = 1
    while cnt[ptr]:
        ptr += 1
    leaf = ptr
    for a in firstcoords:
        order.append(leaf)
        if a:
            parent[leaf] = a
            cnt[a] -= 1
            if cnt[a] == 0 and a < ptr:
                leaf = a
                continue
        ptr += 1
        while ptr <= m and cnt[ptr]:
            ptr += 1
        leaf = ptr
    return order, parent


def _encode_decorated_core(parent: Sequence[int], m: int) -> tuple:
    """Inverse of _decode_decorated_core: returns (pop_order, firstcoords)."""
    cnt = [0] * (m + 1)
    for v in range(1, m + 1):
        if parent[v]:
            cnt[parent[v]] += 1
    order = []
    coords = []
    ptr = 1
    while cnt[ptr]:
        ptr += 1
    leaf = ptr
    for _ in range(m):
        order.append(leaf)
        p = parent[leaf]
        coords.append(p)
        if p:
            cnt[p] -= 1
            if cnt[p] == 0 and p < ptr:
                leaf = p
                continue
        ptr += 1
        while ptr <= m and cnt[ptr]:
            ptr += 1
        leaf = ptr
    return order, coords


def prufer_decode_decorated(seq: Sequence[tuple]) -> DecoratedForest:
    """Decorated forest encoded by ``seq``: a list of (j, label) pairs,
    j in 1..m for an edge entry, j = 0 for a root entry.  The last entry
    must be a root entry."""
    m = len(seq)
    if m == 0:
        raise ValueError("empty sequence")
    firstcoords = []
    for j, _ in seq:
        j = int(j)
        if not 0 <= j <= m:
            raise ValueError(f"first coordinate {j} out of range 0..{m}")
        firstcoords.append(j)
    if firstcoords[-1] != 0:
        raise ValueError("last entry must be a root entry")
    order, parent = _decode_decorated_core(firstcoords, m)
    edge_label = {}
    root_label = {}
    for k, (j, lab) in zip(order, seq):
        if j:
            edge_label[k] = lab
        else:
            root_label[k] = lab
    return DecoratedForest(RootedForest._from_padded_unchecked(parent),
                           edge_label, root_label)


def prufer_encode_decorated(f: DecoratedForest) -> list:
    """Sequence of (j, label) pairs encoding ``f`` (inverse of decode)."""
    f._check()
    m = f.forest.n
    order, coords = _encode_decorated_core(f.forest.parent, m)
    seq = []
    for k, j in zip(order, coords):
        seq.append((j, f.edge_label[k]) if j else (0, f.root_label[k]))
    return seq


# --------------------------------------------------------------------------
# sigma-Prüfer sequences
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaPruferSeq:
    """Blocked sequence for a permutation-invariant tree.

    ``blocks[d]`` is the tuple of entries for cycle length d; length
    lam_1 - 1 for d = 1 and lam_d for d >= 2.  Total length is one less
    than the number of cycles.
    """

    blocks: dict

    def flat(self) -> list:
        out = []
        for d in sorted(self.blocks):
            out.extend(self.blocks[d])
        return out

    def __str__(self) -> str:
        return "(" + "|".join(
            ",".join(map(str, self.blocks[d])) for d in sorted(self.blocks)) + ")"


class _SigmaTables:
    """Per-permutation lookup tables shared by encode/decode/sampling.

    The attachment points of cycle length d (the vertices of period
    properly dividing d) are never materialized per d; they are addressed
    through ``flat`` in the fixed order "cycle length ascending, then cycle
    minimum, then position within cycle", which keeps seeded runs
    reproducible without the quadratic cost of building one list per
    distinct length.
    """

    def __init__(self, s: Permutation):
        n = s.n
        self.s = s
        self.clen = [0] * (n + 1)
        self.cpos = [0] * (n + 1)
        self.cidx = [0] * (n + 1)     # 1-based index among cycles of equal length
        self.ctuple = [None] * (n + 1)
        self.by_len: dict = {}
        for cyc in s.cycles:
            d = len(cyc)
            lst = self.by_len.setdefault(d, [])
            lst.append(cyc)
            i = len(lst)
            for pos, v in enumerate(cyc):
                self.clen[v] = d
                self.cpos[v] = pos
                self.cidx[v] = i
                self.ctuple[v] = cyc
        self.lengths = sorted(self.by_len)
        # flat[d]: vertices of the d-cycles, cycle-major, position-minor
        self.flat = {d: [v for cyc in self.by_len[d] for v in cyc]
                     for d in self.lengths}

    def proper_divisor_lengths(self, d: int) -> list:
        return [e for e in self.lengths if e < d and d % e == 0]

    def attach_index(self, d: int) -> "_AttachIndex":
        """Random access into the attachment points for cycle length d."""
        divs = self.proper_divisor_lengths(d)
        bounds = []
        total = 0
        for e in divs:
            total += e * len(self.by_len[e])
            bounds.append(total)
        return _AttachIndex(bounds, [self.flat[e] for e in divs])

    def mu(self, d: int) -> int:
        """Number of attachment points for d-cycle forests."""
        return sum(e * len(self.by_len[e])
                   for e in self.proper_divisor_lengths(d))


class _AttachIndex:
    """O(log) lookup of the y-th attachment point (order: cycle length,
    cycle minimum, position)."""

    __slots__ = ("bounds", "flats", "size")

    def __init__(self, bounds, flats):
        self.bounds = bounds
        self.flats = flats
        self.size = bounds[-1] if bounds else 0

    def __getitem__(self, y: int) -> int:
        if not 0 <= y < self.size:
            raise IndexError("attachment index out of range")
        i = bisect_right(self.bounds, y)
        return self.flats[i][y - (self.bounds[i - 1] if i else 0)]


def sigma_prufer_encode(t: RootedTree, s: Permutation) -> SigmaPruferSeq:
    """Blocked sequence of an s-invariant tree rooted at 1.

    Block d = 1 is the classical code of the subtree on the fixed points
    (recoded to actual vertex labels) with the forced trailing 1.  For
    d >= 2 the d-cycles are removed lowest-minimum leaf cycle first, each
    removal recording the parent of the cycle's minimum element.
    """
    if not is_invariant(t, s):
        raise ValueError("tree is not invariant under the permutation")
    tab = _SigmaTables(s)
    parent = t.parent
    blocks = {}

    fixed = [c[0] for c in tab.by_len.get(1, [])]
    m = len(fixed)
    rank = {v: i + 1 for i, v in enumerate(fixed)}
    sub_parent = [0] * (m + 1)
    for v in fixed:
        p = parent[v]
        if p:
            sub_parent[rank[v]] = rank[p]
    sub = RootedForest(sub_parent, *_chains_from_parent(sub_parent))
    blocks[1] = tuple(fixed[a - 1] for a in _encode_rooted(sub))

    for d in sorted(tab.by_len):
        if d == 1:
            continue
        cycles_d = tab.by_len[d]
        lam = len(cycles_d)
        qparent = [0] * (lam + 1)
        for i, cyc in enumerate(cycles_d):
            p = parent[cyc[0]]
            if tab.clen[p] == d:
                qparent[i + 1] = tab.cidx[p]
        order, _ = _encode_decorated_core(qparent, lam)
        blocks[d] = tuple(parent[cycles_d[i - 1][0]] for i in order)
    return SigmaPruferSeq(blocks)


def sigma_prufer_decode(seq: SigmaPruferSeq, s: Permutation) -> RootedTree:
    """Inverse of sigma_prufer_encode; output is s-invariant, rooted at 1."""
    if s.image[1] != 1:
        raise ValueError("permutation must fix vertex 1")
    return _sigma_decode(seq, s, _SigmaTables(s))


def _sigma_decode(seq: SigmaPruferSeq, s: Permutation,
                  tab: _SigmaTables) -> RootedTree:
    lam_by_len = {d: len(cs) for d, cs in tab.by_len.items()}
    expect = {d: (c - 1 if d == 1 else c) for d, c in lam_by_len.items()}
    got = {d: len(b) for d, b in seq.blocks.items()}
    if got != expect:
        raise ValueError(f"block lengths {got} do not match cycle type "
                         f"(expected {expect})")
    parent = [0] * (s.n + 1)

    fixed = [c[0] for c in tab.by_len.get(1, [])]
    m = len(fixed)
    block1 = seq.blocks.get(1, ())
    rank = {v: i + 1 for i, v in enumerate(fixed)}
    for w in block1:
        if tab.clen[w] != 1:
            raise ValueError(f"entry {w} of block 1 is not a fixed point")
    if m >= 2 and block1[-1] != 1:
        raise ValueError("last entry of block 1 must be vertex 1")
    sub_parent = _decode_rooted([rank[w] for w in block1], m)
    for i, v in enumerate(fixed):
        if sub_parent[i + 1]:
            parent[v] = fixed[sub_parent[i + 1] - 1]

    clen, cpos, cidx, ctuple = tab.clen, tab.cpos, tab.cidx, tab.ctuple
    for d in sorted(seq.blocks):
        if d == 1:
            continue
        cycles_d = tab.by_len[d]
        lam = len(cycles_d)
        firstcoords = []
        labels = []          # rotation offset for edge entries, target vertex
        block = seq.blocks[d]  # for root entries
        for w in block:
            ell = clen[w]
            if ell == d:
                firstcoords.append(cidx[w])
                labels.append(cpos[w])
            elif ell and d % ell == 0:
                firstcoords.append(0)
                labels.append(w)
            else:
                raise ValueError(f"entry {w} of block {d} has period {ell}, "
                                 f"which does not divide {d}")
        if clen[block[-1]] == d:
            raise ValueError(f"last entry of block {d} must have period "
                             f"strictly dividing {d}")
        order, qparent = _decode_decorated_core(firstcoords, lam)
        for i, x in zip(order, labels):
            child = cycles_d[i - 1]
            p = qparent[i]
            if p:
                target = cycles_d[p - 1]
                for k in range(d):
                    parent[child[k]] = target[(k + x) % d]
            else:
                cyc = ctuple[x]
                ell = len(cyc)
                if ell == 1:
                    for k in range(d):
                        parent[child[k]] = x
                else:
                    j = cpos[x]
                    for k in range(d):
                        parent[child[k]] = cyc[(k + j) % ell]
    return RootedForest._from_padded_unchecked(parent)


# --------------------------------------------------------------------------
# extended sequences for invariant forests
# --------------------------------------------------------------------------

def _lift_forest(f: RootedForest, s: Permutation) -> tuple:
    """Adjoin an anchor vertex, attach all roots to it, shift labels up by
    one; the anchor becomes vertex 1 of a tree on n+1 vertices."""
    n = f.n
    parent = [0] * (n + 2)
    for v in range(1, n + 1):
        parent[v + 1] = f.parent[v] + 1 if f.parent[v] else 1
    img = [0, 1] + [s.image[v] + 1 for v in range(1, n + 1)]
    return (RootedForest._from_padded_unchecked(parent), Permutation(img))


def sigma_prufer_encode_forest(f: RootedForest, s: Permutation) -> SigmaPruferSeq:
    """Extended sequence of an s-invariant rooted forest on {1..n}: entries
    may be 0, standing for "made a root"."""
    t, s1 = _lift_forest(f, s)
    seq = sigma_prufer_encode(t, s1)
    return SigmaPruferSeq({d: tuple(w - 1 for w in b)
                           for d, b in seq.blocks.items()})


def sigma_prufer_decode_forest(seq: SigmaPruferSeq, s: Permutation) -> RootedForest:
    """Inverse of sigma_prufer_encode_forest."""
    lifted = SigmaPruferSeq({d: tuple(w + 1 for w in b)
                             for d, b in seq.blocks.items()})
    img = [0, 1] + [s.image[v] + 1 for v in range(1, s.n + 1)]
    t = sigma_prufer_decode(lifted, Permutation(img))
    parent = [0] * (s.n + 1)
    for v in range(2, s.n + 2):
        parent[v - 1] = t.parent[v] - 1 if t.parent[v] != 1 else 0
    return RootedForest._from_padded_unchecked(parent)
