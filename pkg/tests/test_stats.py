import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyatree.stats import (RAW_COLUMNS, batch_summary, compute_stats,
                             degree_fractions)
from polyatree.treecore import build_tree, log_aut_size

from util import random_tree, tree25


# --------------------------------------------------------------- TreeStats

def test_star_stats():
    for n in (2, 5, 40):
        st_ = compute_stats(build_tree([0] + [1] * (n - 1)))
        assert st_.height == 1
        assert st_.width == n - 1
        assert st_.path_length == n - 1
        assert st_.leaf_count == n - 1
        assert st_.max_degree == n - 1
        assert st_.profile == (n - 1,)


def test_path_stats():
    for n in (2, 5, 17):
        st_ = compute_stats(build_tree([0] + list(range(1, n))))
        assert st_.height == n - 1
        assert st_.width == 1
        assert st_.path_length == n * (n - 1) // 2
        assert st_.leaf_count == 1
        assert st_.max_degree == 2 if n > 2 else 1


def test_single_vertex_stats():
    st_ = compute_stats(build_tree([0]))
    assert st_.height == 0 and st_.width == 0 and st_.profile == ()
    assert st_.leaf_count == 1 and st_.max_degree == 0
    assert st_.degree_hist == {0: 1}


def test_tree25_stats():
    st_ = compute_stats(tree25())
    assert st_.height == 3
    assert st_.leaf_count == 12
    assert st_.n == 25


@given(st.integers(min_value=1, max_value=120), st.integers())
@settings(max_examples=80)
def test_stats_identities(n, seed):
    rng = np.random.default_rng(seed % 2 ** 32)
    t = random_tree(n, rng)
    s = compute_stats(t)
    assert sum(s.profile) == n - 1
    assert s.width == (max(s.profile) if s.profile else 0)
    assert s.path_length == sum((k + 1) * w for k, w in enumerate(s.profile))
    assert sum(s.degree_hist.values()) == n
    assert sum(d * c for d, c in s.degree_hist.items()) == 2 * (n - 1)
    assert s.leaf_count == sum(1 for v in range(1, n + 1)
                               if t.firstborn[v] == 0)
    assert math.isclose(s.log_aut, log_aut_size(t), abs_tol=1e-12)


# ------------------------------------------------------------ batch summary

def test_batch_determinism_same_seed():
    a = batch_summary("polya", 40, 200, seed=9)
    b = batch_summary("polya", 40, 200, seed=9)
    assert a.features["height"].total == b.features["height"].total
    assert a.features["log_aut"].total == b.features["log_aut"].total
    assert a.degree_hist == b.degree_hist


def test_batch_thread_count_invariance():
    a = batch_summary("cayley", 30, 600, seed=4, threads=1, chunk=128)
    b = batch_summary("cayley", 30, 600, seed=4, threads=2, chunk=128)
    for name in RAW_COLUMNS:
        assert a.features[name].total == b.features[name].total
        assert a.features[name].total_sq == b.features[name].total_sq
    assert a.degree_hist == b.degree_hist


def test_batch_rejects_burnin_for_cayley():
    with pytest.raises(ValueError, match="burn-in"):
        batch_summary("cayley", 10, 10, burnin=5)


def test_batch_rejects_unknown_kind():
    with pytest.raises(ValueError):
        batch_summary("uniform", 10, 10)


def test_batch_counts_and_normalized():
    s = batch_summary("cayley", 100, 300, seed=1)
    assert s.features["height"].count == 300
    norm = s.normalized()
    assert math.isclose(norm["height_over_sqrt_n"][0],
                        s.features["height"].mean / 10.0)
    total_deg = sum(s.degree_hist.values())
    assert total_deg == 300 * 100


def test_batch_raw_csv(tmp_path):
    path = tmp_path / "raw.csv"
    s = batch_summary("polya", 20, 50, seed=3, raw_path=str(path))
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(RAW_COLUMNS)
    assert len(rows) == 51
    heights = [int(r[0]) for r in rows[1:]]
    assert sum(heights) == s.features["height"].total


def test_cayley_leaf_fraction_small_scale():
    # mean leaf count ~ n/e for uniform labeled trees
    s = batch_summary("cayley", 1000, 1500, seed=12)
    frac = s.features["leaf_count"].mean / 1000
    assert abs(frac - 1 / math.e) < 0.01


def test_polya_leaf_fraction_small_scale():
    s = batch_summary("polya", 1000, 1200, seed=13)
    frac = s.features["leaf_count"].mean / 1000
    assert abs(frac - 0.438156) < 0.012


def test_degree_fractions_n2():
    fr = degree_fractions("cayley", 2, 30, seed=0)
    assert fr[0] == 1.0
    assert sum(fr) == 1.0


def test_degree_fractions_cayley_poissonish():
    # degree-k fraction ~ e^{-1}/(k-1)! in the balls-in-boxes limit
    fr = degree_fractions("cayley", 2000, 800, seed=5)
    for k in (1, 2, 3, 4):
        ref = math.exp(-1) / math.factorial(k - 1)
        assert abs(fr[k - 1] - ref) < 0.02


def test_polya_log_aut_small_scale():
    s = batch_summary("polya", 2000, 400, seed=14)
    assert abs(s.features["log_aut"].mean / 2000 - 0.1373) < 0.02
