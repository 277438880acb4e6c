"""Exact big-integer tree counts.

Everything here is arbitrary-precision integer arithmetic; no floats.

The central formula counts labeled trees rooted at 1 that a permutation
sigma (fixing 1, with lam_d cycles of length d) maps onto themselves:

    t_sigma = lam_1^(lam_1 - 2) * prod over d >= 2 of f(lam_d, d, mu_d)

where f(m, x, y) = (m*x + y)^(m-1) * y counts forests on [m] with an edge
label in [x] and a root label in [y], and mu_d = sum of e*lam_e over proper
divisors e of d.  For the identity this collapses to Cayley's n^(n-2).
The lam_1 in {1, 2} cases are taken as 1: the empty and the forced
two-vertex fixed subtree each admit exactly one tree.
"""

from __future__ import annotations

from typing import Sequence

from .treecore import CycleIndex, Permutation

__all__ = [
    "f_count",
    "count_invariant_trees",
    "count_invariant_trees_type",
    "polya_counts",
    "count_commuting_functions",
    "count_phylo_fixed",
]


def f_count(m: int, x: int, y: int) -> int:
    """Number of forests on [m] with root labels in [y] and edge labels in
    [x]: (m*x + y)^(m-1) * y."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if x < 0 or y < 0:
        raise ValueError("label-set sizes must be >= 0")
    return (m * x + y) ** (m - 1) * y


def count_invariant_trees_type(idx: CycleIndex) -> int:
    """count_invariant_trees from a cycle index (must contain fixed points)."""
    lam1 = idx.lam.get(1, 0)
    if lam1 < 1:
        raise ValueError("permutation must fix vertex 1 (no fixed points)")
    total = lam1 ** (lam1 - 2) if lam1 >= 3 else 1
    for d in sorted(idx.lam):
        if d == 1:
            continue
        total *= f_count(idx.lam[d], d, idx.mu[d])
    return total


def count_invariant_trees(s: Permutation) -> int:
    """Number of labeled trees on [n] rooted at 1 invariant under s."""
    if s.image[1] != 1:
        raise ValueError("permutation must fix vertex 1")
    return count_invariant_trees_type(s.cycle_type)


def polya_counts(nmax: int) -> list:
    """Counts t_1..t_nmax of rooted unlabeled trees (OEIS A000081).

    Derived from the generating-function identity
    t(x) = x*exp(t(x) + t(x^2)/2 + t(x^3)/3 + ...) by logarithmic
    differentiation, which gives the convolution recurrence

        t_{n+1} = (1/n) * sum_{k=1..n} (sum_{d|k} d*t_d) * t_{n-k+1}

    with t_1 = 1.  The division is exact.
    """
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    t = [0, 1]                      # 1-based
    sigma = [0]                     # sigma[k] = sum_{d|k} d*t_d, filled lazily
    for n in range(1, nmax):
        sigma.append(sum(d * t[d] for d in range(1, n + 1) if n % d == 0))
        acc = 0
        for k in range(1, n + 1):
            acc += sigma[k] * t[n - k + 1]
        q, r = divmod(acc, n)
        assert r == 0
        t.append(q)
    return t[1:]


def count_commuting_functions(s: Permutation) -> int:
    """Number of functions [n] -> [n] commuting with s:
    product over d of (sum over all divisors e of d of e*lam_e)^lam_d.

    Note the inner sum runs over all divisors including e = d; with proper
    divisors only the count would vanish whenever s has a cycle of maximal
    length, contradicting direct enumeration (the identity always commutes).
    """
    lam = s.cycle_type.lam
    total = 1
    for d, cnt in lam.items():
        full = sum(e * lam[e] for e in lam if d % e == 0)
        total *= full ** cnt
    return total


def count_phylo_fixed(lambdas: Sequence[int]) -> int:
    """Number of leaf-labeled binary trees on n = sum(lambdas) leaves fixed
    by a permutation with the given cycle lengths (given in decreasing
    order): prod over i >= 2 of (2*(lam_i + ... + lam_l) - 1).

    The all-ones type gives the classical double factorial (2n-3)!!.
    """
    lams = [int(x) for x in lambdas]
    if not lams:
        raise ValueError("empty cycle type")
    if any(x < 1 for x in lams):
        raise ValueError("cycle lengths must be >= 1")
    if any(lams[i] < lams[i + 1] for i in range(len(lams) - 1)):
        raise ValueError("cycle lengths must be in decreasing order")
    total = 1
    suffix = 0
    for x in reversed(lams[1:]):
        suffix += x
        total *= 2 * suffix - 1
    return total
