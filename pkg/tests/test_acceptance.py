"""Acceptance suite: one test per criterion, each printing a PASS line.

The expensive sampling batches are shared session fixtures.  Chain batches
record consecutive states after burn-in (means and distribution fits);
uniformity chi-squares draw independent chains per sample.
"""

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from itertools import permutations

import numpy as np
import pytest
from scipy.stats import chisquare

from polyatree.burnside import (ChainConfig, sample_polya,
                                uniform_automorphism, uniform_invariant_tree)
from polyatree.constants import estimate_b, sigma_gw, solve_rho
from polyatree.counting import count_invariant_trees, polya_counts
from polyatree.oracle import (enumerate_automorphisms,
                              enumerate_invariant_trees, enumerate_trees)
from polyatree.prufer import (cayley_decode, cayley_encode,
                              prufer_decode_decorated,
                              prufer_encode_decorated, sample_cayley,
                              sigma_prufer_decode, sigma_prufer_encode)
from polyatree.refdist import RHO_16, fit_excursion_scale
from polyatree.seeding import master_rng, stream_rng
from polyatree.stats import batch_summary
from polyatree.treecore import (Permutation, ahu_canonical,
                                automorphism_partition, build_tree)

from util import random_perm_fixing_1

POLYA_TABLE = [1, 1, 2, 4, 9, 20, 48, 115, 286, 719]
DEGREE_TABLE = [0.438156, 0.293998, 0.159114, 0.068592, 0.026027]


def _report(criterion, detail):
    print(f"\nACCEPTANCE {criterion}: PASS  {detail}")


# --------------------------------------------------------- shared fixtures

@pytest.fixture(scope="session")
def polya_10k():
    return batch_summary("polya", 10_000, 10_000, seed=90_001, threads=2)


@pytest.fixture(scope="session")
def cayley_10k():
    return batch_summary("cayley", 10_000, 10_000, seed=90_002, threads=2)


@pytest.fixture(scope="session")
def polya_1k_raw(tmp_path_factory):
    path = tmp_path_factory.mktemp("batch") / "polya1k.csv"
    summary = batch_summary("polya", 1000, 100_000, seed=90_003, threads=2,
                            raw_path=str(path))
    raw = np.loadtxt(path, delimiter=",", skiprows=1)
    return summary, raw


# ---------------------------------------------------------------- criteria

def test_criterion_1_polya_counts():
    start = time.time()
    values = polya_counts(10)
    elapsed = time.time() - start
    assert values == POLYA_TABLE
    assert elapsed < 1.0
    _report(1, f"t_1..t_10 exact in {elapsed * 1000:.1f} ms")


def test_criterion_2_formula_vs_enumeration():
    start = time.time()
    checked = 0
    for n in range(3, 8):
        trees = [t.parent for t in enumerate_trees(n)]
        for rest in permutations(range(2, n + 1)):
            s = Permutation.from_image([1] + list(rest))
            img = s.image
            brute = 0
            for p in trees:
                invariant = True
                for v in range(2, n + 1):
                    if p[img[v]] != img[p[v]]:
                        invariant = False
                        break
                brute += invariant
            assert brute == count_invariant_trees(s), (n, s)
            checked += 1
    elapsed = time.time() - start
    assert elapsed < 120
    _report(2, f"{checked} permutations, n=3..7, exact, {elapsed:.1f} s")


def test_criterion_3_burnside_lemma():
    for n in range(1, 9):
        total = 0
        for rest in permutations(range(2, n + 1)):
            total += count_invariant_trees(
                Permutation.from_image([1] + list(rest)))
        q, r = divmod(total, math.factorial(n - 1))
        assert r == 0 and q == POLYA_TABLE[n - 1]
    _report(3, "orbit-count average equals t_n exactly for n <= 8")


def test_criterion_4_half_step_uniformity():
    start = time.time()
    draws = 100_000
    details = []
    for cycles in ([(2, 3)], [(2, 3), (4, 5)], [(2, 3, 4)]):
        s = Permutation.from_cycles(6, cycles)
        support = {t.parent for t in enumerate_invariant_trees(s)}
        rng = master_rng(41_000 + len(cycles))
        counts = Counter(uniform_invariant_tree(s, rng).parent
                         for _ in range(draws))
        assert set(counts) == support
        _, pval = chisquare(list(counts.values()))
        assert pval > 0.001, (cycles, pval)
        details.append(f"inv{cycles}: p={pval:.3f}")
    for parents in ([0, 1, 1, 2, 2, 3, 3], [0] + [1] * 6,
                    [0, 1, 1, 2, 2, 1, 3]):
        t = build_tree(parents)
        p = automorphism_partition(t)
        auts = {a.image for a in enumerate_automorphisms(t)}
        rng = master_rng(42_000 + len(auts))
        counts = Counter(uniform_automorphism(t, p, rng).image
                         for _ in range(draws))
        assert set(counts) == auts
        _, pval = chisquare(list(counts.values()))
        assert pval > 0.001, (parents, pval)
        details.append(f"aut|{len(auts)}|: p={pval:.3f}")
    elapsed = time.time() - start
    assert elapsed < 300
    _report(4, "; ".join(details) + f"; {elapsed:.0f} s")


def _class_counts_chunk(args):
    n, seed, lo, hi = args
    counts = Counter()
    for i in range(lo, hi):
        t = sample_polya(ChainConfig(n=n, burnin=20), stream_rng(seed, i))
        counts[ahu_canonical(t).root_code] += 1
    return counts


def _class_counts(n, seed, samples, workers=2):
    bounds = np.linspace(0, samples, workers + 1).astype(int)
    jobs = [(n, seed, int(bounds[i]), int(bounds[i + 1]))
            for i in range(workers)]
    total = Counter()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_class_counts_chunk, jobs):
            total.update(part)
    return total


def test_criterion_5_chain_uniformity():
    start = time.time()
    counts4 = _class_counts(4, 50_004, 100_000)
    assert len(counts4) == 4
    freqs = [v / 100_000 for v in counts4.values()]
    assert all(abs(f - 0.25) <= 0.01 for f in freqs), freqs

    counts8 = _class_counts(8, 50_008, 200_000)
    assert len(counts8) == 115
    _, pval = chisquare(list(counts8.values()))
    assert pval > 0.001, pval
    elapsed = time.time() - start
    assert elapsed < 600
    _report(5, f"n=4 freqs within 0.25+-0.01; n=8 chi2 over 115 classes "
               f"p={pval:.3f}; {elapsed:.0f} s")


def test_criterion_6_round_trips():
    rng = master_rng(60_000)
    cases = 10_000
    for _ in range(cases):
        n = int(rng.integers(1, 120))
        t = sample_cayley(n, rng)
        assert cayley_decode(cayley_encode(t), n) == t
    for _ in range(cases):
        m = int(rng.integers(1, 30))
        seq = []
        for i in range(m):
            j = 0 if i == m - 1 else int(rng.integers(0, m + 1))
            seq.append((j, int(rng.integers(0, 4))))
        f = prufer_decode_decorated(seq)
        assert prufer_encode_decorated(f) == seq
    for _ in range(cases):
        n = int(rng.integers(2, 48))
        s = random_perm_fixing_1(n, rng)
        t = uniform_invariant_tree(s, rng)
        seq = sigma_prufer_encode(t, s)
        assert sigma_prufer_decode(seq, s) == t
    _report(6, f"{cases} random cases per code family, zero failures")


def test_criterion_7_constants():
    start = time.time()
    sol = solve_rho(40, 60)
    b = estimate_b(sol, precision=60)
    sigma = sigma_gw(b, sol[1])
    elapsed = time.time() - start
    from mpmath import mp, mpf
    with mp.workdps(40):
        rho_ref = mpf("0.3383218568992077")
        b_ref = mpf("2.681128147267112")
        sigma_ref = mpf("1.1027259685996555")
        assert abs(sol[1] - rho_ref) / rho_ref < mpf(10) ** -14 / 2
        assert abs(b - b_ref) / b_ref < mpf(10) ** -11 / 2
        assert abs(sigma - sigma_ref) / sigma_ref < mpf(10) ** -11 / 2
    assert elapsed < 10
    _report(7, f"rho to 15, b to 12, sigma to 12 digits in {elapsed:.1f} s")


def test_criterion_8_leaf_fractions(polya_10k, cayley_10k):
    polya_frac = polya_10k.features["leaf_count"].mean / 10_000
    cayley_frac = cayley_10k.features["leaf_count"].mean / 10_000
    assert abs(polya_frac - 0.438156) < 0.005
    assert abs(cayley_frac - 1 / math.e) < 0.005
    _report(8, f"leaf fractions: unlabeled {polya_frac:.5f} (ref 0.43816), "
               f"labeled {cayley_frac:.5f} (ref {1 / math.e:.5f})")


def test_criterion_9_degree_fractions(polya_10k):
    observed = [polya_10k.degree_fraction(k) for k in range(1, 6)]
    for got, ref in zip(observed, DEGREE_TABLE):
        assert abs(got - ref) < 0.005, (got, ref)
    _report(9, "degree fractions 1..5 within 0.005: "
               + " ".join(f"{v:.5f}" for v in observed))


def test_criterion_10_automorphism_growth(polya_10k):
    mean_log_aut = polya_10k.features["log_aut"].mean / 10_000
    assert abs(mean_log_aut - 0.1373) < 0.01
    _report(10, f"mean log|Aut|/n = {mean_log_aut:.5f} (ref 0.13734)")


def test_criterion_11_max_degree_location(polya_1k_raw):
    # The bounded-degree law exp(-c*n*rho^m) concerns the largest child
    # count (the generating functions bound out-degrees), so the location
    # check uses max_out_degree; the undirected maximum sits one higher
    # (8.5 at n = 1000) and would miss the band for that trivial reason.
    summary, _ = polya_1k_raw
    mod = summary.features["max_out_degree"]
    location = math.log(1000) / math.log(1 / RHO_16)
    assert abs(mod.mean - location) <= 1.5
    _report("11a", f"mean max out-degree {mod.mean:.3f} within 1.5 of "
                   f"log-location {location:.3f}")


def test_criterion_11_max_degree_support(polya_1k_raw):
    # Stated bound: the four most frequent values carry >= 95% of the mass.
    # The true top-4 mass at n = 1000 is ~93.2% (the law's own CDF with
    # rho and c = 1.1103 gives 93.0%, and the chain histogram is burn-in
    # insensitive and exact at enumerable sizes), so this sub-criterion is
    # unattainable as stated; it is asserted faithfully and expected red.
    # Five values do carry >= 95%.
    summary, _ = polya_1k_raw
    hist = summary.features["max_out_degree"].hist
    total = sum(hist.values())
    ranked = sorted(hist.values(), reverse=True)
    top4 = sum(ranked[:4]) / total
    top5 = sum(ranked[:5]) / total
    print(f"\nACCEPTANCE 11b: top-4 support {top4:.4f} (stated >= 0.95, "
          f"true value ~0.932); top-5 support {top5:.4f}")
    assert top4 >= 0.95, (f"top-4 mass {top4:.4f} < 0.95: the stated "
                          f"concentration bound exceeds the true "
                          f"distribution's (top-5 = {top5:.4f})")


def test_criterion_12_height_scale(polya_1k_raw):
    # Faithful fit of H/sqrt(n) against the excursion-max law.  Every
    # protocol (CDF/density/likelihood/quantile least squares) puts the
    # scale at ~1.13 for exactly-uniform samples at n = 1000, outside the
    # stated [1.00, 1.08]; that band is reproduced only by fitting the
    # Kolmogorov (bridge sup-modulus) CDF instead, which is what the
    # reported ~1.04 evidently comes from (the law is *named* Kolmogorov
    # where its excursion-range formula is displayed).  Asserted faithfully
    # and expected red; the diagnostic fit is printed alongside.
    _, raw = polya_1k_raw
    heights = raw[:, 0] / math.sqrt(1000)
    mu_e, sigma_e = fit_excursion_scale(heights)
    mu_k, sigma_k = _fit_kolmogorov_scale(heights)
    print(f"\nACCEPTANCE 12: excursion-law fit sigma_e = {sigma_e:.4f} "
          f"(mu_e = {mu_e:.4f}); Kolmogorov-CDF fit gives {sigma_k:.4f}, "
          f"matching the reported ~1.04; asymptotic 1.1027 not asserted")
    assert 1.00 <= sigma_e <= 1.08, (
        f"sigma_e = {sigma_e:.4f}: the faithful excursion-law fit sits at "
        f"~1.13; the stated band matches a Kolmogorov-CDF fit "
        f"({sigma_k:.4f}) instead")


def _kolmogorov_cdf(x):
    if x <= 0.05:
        return 0.0
    s = 0.0
    for k in range(1, 200):
        t = 2.0 * k * k * x * x
        if t > 700:
            break
        s += (-1) ** (k - 1) * math.exp(-t)
    return min(1.0, max(0.0, 1.0 - 2.0 * s))


def _fit_kolmogorov_scale(samples):
    from scipy.optimize import minimize
    xs = np.sort(np.asarray(samples, dtype=float))
    idx = np.linspace(0, xs.size - 1, 1500).astype(int)
    sub = xs[idx]
    q = (idx + 0.5) / xs.size

    def loss(params):
        mu, sigma = params
        if sigma <= 0:
            return 1e9
        model = np.array([_kolmogorov_cdf(mu + 0.5 * sigma * x) for x in sub])
        return float(np.mean((model - q) ** 2))

    best = minimize(loss, x0=[0.0, 1.0], method="Nelder-Mead",
                    options={"xatol": 1e-6, "fatol": 1e-12})
    return float(best.x[0]), float(best.x[1])


def test_criterion_13_large_sample_performance():
    start = time.time()
    t = sample_polya(ChainConfig(n=10 ** 6, burnin=20), master_rng(13_000))
    elapsed = time.time() - start
    assert t.n == 10 ** 6 and t.is_tree()
    assert elapsed < 300
    _report(13, f"one n=1e6 sample, burn-in 20, in {elapsed:.0f} s (< 300 s)")
