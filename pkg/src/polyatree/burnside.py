"""Markov chain whose stationary distribution is uniform over tree shapes.

One step alternates two exact half-steps: from the current labeled tree,
draw a uniformly random automorphism; from that permutation, draw a
uniformly random tree it leaves invariant.  The walk is reversible on
labeled trees with stationary mass inversely proportional to orbit size,
so reading the current tree up to isomorphism yields the uniform
distribution over rooted unlabeled trees on n vertices.

No mixing-time bound is known; runs from the height-1 star are observed to
equilibrate in about 20 steps across a wide range of n, and 20 is the
default burn-in.  Treat it as an empirical default, not a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import seeding
from .prufer import SigmaPruferSeq, _sigma_decode, _SigmaTables
from .treecore import (AutomorphismPartition, Permutation, RootedForest,
                       RootedTree, automorphism_partition, build_tree)

__all__ = [
    "ChainConfig",
    "star_tree",
    "uniform_automorphism",
    "uniform_invariant_tree",
    "burnside_step",
    "sample_polya",
    "chain_trace",
]


@dataclass(frozen=True)
class ChainConfig:
    """Chain parameters: vertex count, burn-in steps, seed, initial tree.

    ``initial`` is either "star" (the height-1 tree, every vertex attached
    to the root) or an explicit RootedTree on n vertices.
    """

    n: int
    burnin: int = 20
    seed: int | None = None
    initial: object = "star"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.burnin < 0:
            raise ValueError("burnin must be >= 0")

    def initial_tree(self) -> RootedTree:
        if isinstance(self.initial, RootedForest):
            if self.initial.n != self.n:
                raise ValueError("initial tree has wrong vertex count")
            return self.initial
        if self.initial == "star":
            return star_tree(self.n)
        raise ValueError(f"unknown initial tree specifier {self.initial!r}")


def star_tree(n: int) -> RootedTree:
    """Height-1 tree: vertices 2..n all attached to the root."""
    return build_tree([0] + [1] * (n - 1))


def uniform_automorphism(t: RootedTree, p: AutomorphismPartition,
                         rng: np.random.Generator) -> Permutation:
    """Uniformly random automorphism of t, given its orbit partition.

    Descends from the root; at each vertex pair (u, f(u)) the children of u
    are matched to the children of f(u) orbit class by orbit class with a
    uniformly random bijection.  Sequential uniform picks without
    replacement and a shuffled pool draw the same distribution; the pool
    form needs one shuffle per class.
    """
    if t.n != p.n:
        raise ValueError("partition size does not match tree")
    n = t.n
    firstborn, nextsib = t.firstborn, t.nextsib
    orbit = p.orbit
    rigid = p.rigid or (False,) * (n + 1)
    f = list(range(n + 1))        # identity outside the visited region
    stack = [(1, 1)]
    shuffle = rng.shuffle
    while stack:
        u, fu = stack.pop()
        groups: dict = {}
        c = firstborn[u]
        while c:
            groups.setdefault(orbit[c], []).append(c)
            c = nextsib[c]
        if not groups:
            continue
        if fu == u:
            fgroups = groups
        else:
            fgroups = {}
            c = firstborn[fu]
            while c:
                fgroups.setdefault(orbit[c], []).append(c)
                c = nextsib[c]
        for key, members in groups.items():
            targets = fgroups.get(key)
            if targets is None or len(targets) != len(members):
                raise ValueError("partition inconsistent with tree: empty "
                                 "candidate set while matching children")
            if len(members) == 1:
                v, w = members[0], targets[0]
                f[v] = w
                if v != w or not rigid[v]:
                    stack.append((v, w))
            else:
                pool = list(targets)
                shuffle(pool)
                for v, w in zip(members, pool):
                    f[v] = w
                    if v != w or not rigid[v]:
                        stack.append((v, w))
    return Permutation._from_padded_unchecked(f)


def uniform_invariant_tree(s: Permutation, rng: np.random.Generator,
                           choice_log: list | None = None) -> RootedTree:
    """Uniformly random tree on [n], rooted at 1, invariant under s.

    Draws a uniform blocked sequence (classical code on the fixed points
    plus, per cycle length d, lam_d - 1 entries over the d-cycle vertices
    and attachment points and one forced attachment entry) and decodes it.
    Distinct draws give distinct trees, so the output is exactly uniform
    over the invariant trees.

    When ``choice_log`` is a list, the size of each uniform choice made is
    appended to it; the product of the logged sizes equals the invariant
    tree count for s.
    """
    if s.image[1] != 1:
        raise ValueError("permutation must fix vertex 1")
    tab = _SigmaTables(s)
    blocks = {}

    fixed = [c[0] for c in tab.by_len.get(1, [])]
    m = len(fixed)
    if m >= 2:
        if m > 2:
            farr = np.asarray(fixed)
            body = farr[rng.integers(0, m, size=m - 2)].tolist()
        else:
            body = []
        blocks[1] = tuple(body) + (1,)
        if choice_log is not None:
            choice_log.extend([m] * (m - 2))
    else:
        blocks[1] = ()

    for d in tab.lengths:
        if d == 1:
            continue
        flat_d = tab.flat[d]
        lam = len(tab.by_len[d])
        attach = tab.attach_index(d)
        mu = attach.size
        # symbol q < lam*d names a d-cycle vertex (edge entry), the rest
        # name the mu attachment points of period strictly dividing d
        W = lam * d + mu
        edge_count = lam * d
        block = []
        if lam > 1:
            for q in rng.integers(0, W, size=lam - 1).tolist():
                block.append(flat_d[q] if q < edge_count
                             else attach[q - edge_count])
            if choice_log is not None:
                choice_log.extend([W] * (lam - 1))
        block.append(attach[int(rng.integers(0, mu))])
        if choice_log is not None:
            choice_log.append(mu)
        blocks[d] = tuple(block)
    return _sigma_decode(SigmaPruferSeq(blocks), s, tab)


def burnside_step(t: RootedTree, rng: np.random.Generator,
                  partition: AutomorphismPartition | None = None) -> RootedTree:
    """One full chain step: uniform automorphism, then uniform invariant
    tree.  Pass ``partition`` to reuse an already-computed orbit partition
    of t."""
    if partition is None:
        partition = automorphism_partition(t)
    s = uniform_automorphism(t, partition, rng)
    return uniform_invariant_tree(s, rng)


def sample_polya(cfg: ChainConfig, rng: np.random.Generator | None = None) -> RootedTree:
    """Labeled representative of an (approximately) uniform random unlabeled
    rooted tree on cfg.n vertices: start at the star, run cfg.burnin steps.
    Interpret the result up to isomorphism via ahu_canonical."""
    if rng is None:
        rng = seeding.master_rng(cfg.seed)
    t = cfg.initial_tree()
    for _ in range(cfg.burnin):
        t = burnside_step(t, rng)
    return t


def chain_trace(cfg: ChainConfig, steps: int,
                rng: np.random.Generator | None = None) -> list:
    """Per-state statistics of a chain run: records the TreeStats of states
    t_0 (the initial tree), t_1, ..., t_{steps-1}.  Useful for burn-in
    diagnostics."""
    from .stats import compute_stats
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if rng is None:
        rng = seeding.master_rng(cfg.seed)
    t = cfg.initial_tree()
    out = [compute_stats(t)]
    for _ in range(steps - 1):
        t = burnside_step(t, rng)
        out.append(compute_stats(t))
    return out
