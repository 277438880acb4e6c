"""Uniform sampling and exact counting for labeled and unlabeled rooted trees.

Labeled trees rooted at 1 ("Cayley trees") are drawn exactly uniformly via
classical Prüfer codes.  Unlabeled rooted trees ("Pólya trees") are drawn
via a two-half-step Markov chain on labeled trees (random automorphism,
then random invariant tree) whose stationary distribution is uniform over
isomorphism classes.  Companion modules provide exact counts of trees
invariant under a permutation, the singularity constants of the unlabeled
counts, per-tree shape statistics, and the analytic reference laws the
sampled statistics converge to.
"""

__version__ = "0.1.0"

from .burnside import (ChainConfig, burnside_step, chain_trace, sample_polya,
                       star_tree, uniform_automorphism, uniform_invariant_tree)
from .counting import (count_commuting_functions, count_invariant_trees,
                       count_phylo_fixed, f_count, polya_counts)
from .prufer import (DecoratedForest, SigmaPruferSeq, cayley_decode,
                     cayley_encode, prufer_decode_decorated,
                     prufer_encode_decorated, sample_cayley,
                     sigma_prufer_decode, sigma_prufer_decode_forest,
                     sigma_prufer_encode, sigma_prufer_encode_forest)
from .stats import TreeStats, batch_summary, compute_stats, degree_fractions
from .treecore import (AutomorphismPartition, CanonicalCode, CycleIndex,
                       Permutation, RootedForest, RootedTree, ahu_canonical,
                       aut_size_exact, automorphism_partition, build_tree,
                       is_invariant, log_aut_size, quotient)

__all__ = [name for name in dir() if not name.startswith("_")]
