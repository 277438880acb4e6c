"""Per-tree features and batch aggregation.

``compute_stats`` extracts the standard shape features of one tree.
``batch_summary`` aggregates them over many samples with constant memory:
integer features keep exact histograms, all features keep count/sum/sum of
squares, and per-vertex degrees are tallied into one global histogram.

Sampling protocol.  Samples are split into fixed-size chunks; chunk c draws
from stream c of the master seed (see seeding).  A "cayley" chunk draws
independent uniform labeled trees.  A "polya" chunk runs one chain: burn-in
steps from the star, then consecutive states are recorded as samples.
Consecutive chain states are correlated, which leaves sample means unbiased
(up to the burn-in approximation) but makes this protocol unsuitable for
independence-based tests; use sample_polya per draw for those.  Chunking is
a function of the sample count alone, so the thread count changes
scheduling, never output.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import sqrt

from . import seeding
from .burnside import star_tree, uniform_automorphism, uniform_invariant_tree
from .prufer import sample_cayley
from .treecore import AutomorphismPartition, RootedTree, TreeAnalysis, _analyze

__all__ = [
    "TreeStats",
    "FeatureSummary",
    "BatchSummary",
    "compute_stats",
    "batch_summary",
    "degree_fractions",
    "RAW_COLUMNS",
]

DEFAULT_CHUNK = 512
RAW_COLUMNS = ("height", "path_length", "width", "leaf_count",
               "max_degree", "log_aut")


@dataclass(frozen=True)
class TreeStats:
    """Shape features of one rooted tree.

    profile[k-1] is the number of vertices at distance k from the root, so
    sum(profile) = n - 1 and path_length = sum(k * profile[k-1]).  Degrees
    are undirected: the root counts its children, everyone else counts
    children plus one.  max_out_degree is the largest child count, the
    quantity governed by the bounded-out-degree asymptotics (it differs
    from max_degree by one unless the root alone attains the maximum).
    """

    n: int
    height: int
    path_length: int
    profile: tuple
    width: int
    degree_hist: dict
    leaf_count: int
    max_degree: int
    max_out_degree: int
    log_aut: float

    def as_row(self) -> tuple:
        return (self.height, self.path_length, self.width, self.leaf_count,
                self.max_degree, self.log_aut)


def _stats_from_analysis(t: RootedTree, a: TreeAnalysis) -> TreeStats:
    n = t.n
    depth = a.depth
    height = 0
    path_length = 0
    counts: dict = {}
    for v in a.order:
        d = depth[v]
        if d:
            path_length += d
            counts[d] = counts.get(d, 0) + 1
            if d > height:
                height = d
    profile = tuple(counts.get(k, 0) for k in range(1, height + 1))
    width = max(profile) if profile else 0

    parent = t.parent
    nchild = [0] * (n + 1)
    for v in range(2, n + 1):
        nchild[parent[v]] += 1
    degree_hist: dict = {}
    leaf_count = 0
    max_degree = 0
    max_out = 0
    for v in range(1, n + 1):
        deg = nchild[v] + (1 if v != 1 else 0)
        degree_hist[deg] = degree_hist.get(deg, 0) + 1
        if nchild[v] == 0:
            leaf_count += 1
        if deg > max_degree:
            max_degree = deg
        if nchild[v] > max_out:
            max_out = nchild[v]
    return TreeStats(n=n, height=height, path_length=path_length,
                     profile=profile, width=width, degree_hist=degree_hist,
                     leaf_count=leaf_count, max_degree=max_degree,
                     max_out_degree=max_out, log_aut=a.log_aut)


def compute_stats(t: RootedTree) -> TreeStats:
    """All features of one tree (one traversal plus the canonical-form pass
    behind log_aut)."""
    return _stats_from_analysis(t, _analyze(t))


# --------------------------------------------------------------------------
# batch aggregation
# --------------------------------------------------------------------------

@dataclass
class FeatureSummary:
    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0
    min: float = float("inf")
    max: float = float("-inf")
    hist: dict | None = None      # exact counts for integer features

    def add(self, x) -> None:
        self.count += 1
        self.total += x
        self.total_sq += x * x
        if x < self.min:
            self.min = x
        if x > self.max:
            self.max = x
        if self.hist is not None:
            self.hist[x] = self.hist.get(x, 0) + 1

    def merge(self, other: "FeatureSummary") -> None:
        self.count += other.count
        self.total += other.total
        self.total_sq += other.total_sq
        self.min = min(self.min, other.min)
        self.max = max(self.max, other.max)
        if self.hist is not None and other.hist is not None:
            for k, v in other.hist.items():
                self.hist[k] = self.hist.get(k, 0) + v

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        m = self.mean
        return max(0.0, (self.total_sq - self.count * m * m) / (self.count - 1))

    @property
    def sd(self) -> float:
        return sqrt(self.variance)


def _new_feature_summaries() -> dict:
    return {
        "height": FeatureSummary(hist={}),
        "path_length": FeatureSummary(),
        "width": FeatureSummary(hist={}),
        "leaf_count": FeatureSummary(hist={}),
        "max_degree": FeatureSummary(hist={}),
        "max_out_degree": FeatureSummary(hist={}),
        "log_aut": FeatureSummary(),
    }


@dataclass
class BatchSummary:
    kind: str
    n: int
    samples: int
    burnin: int | None
    seed: int | None
    features: dict
    degree_hist: dict

    def normalized(self) -> dict:
        """Means and sds of the scale-free forms of the main features."""
        rn = sqrt(self.n)
        f = self.features
        return {
            "height_over_sqrt_n": (f["height"].mean / rn, f["height"].sd / rn),
            "width_over_sqrt_n": (f["width"].mean / rn, f["width"].sd / rn),
            "path_length_over_n32": (f["path_length"].mean / self.n ** 1.5,
                                     f["path_length"].sd / self.n ** 1.5),
            "leaf_fraction": (f["leaf_count"].mean / self.n,
                              f["leaf_count"].sd / self.n),
            "log_aut_over_n": (f["log_aut"].mean / self.n,
                               f["log_aut"].sd / self.n),
        }

    def degree_fraction(self, k: int) -> float:
        return self.degree_hist.get(k, 0) / (self.samples * self.n)


def _chunk_sizes(samples: int, chunk: int) -> list:
    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)
    return sizes


def _run_chunk(args) -> tuple:
    """One worker unit: (summaries, degree_hist, raw rows or None)."""
    kind, n, count, burnin, seed, index, want_raw = args
    rng = seeding.stream_rng(seed, index)
    sums = _new_feature_summaries()
    deg_hist: dict = {}
    rows = [] if want_raw else None

    def record(t: RootedTree, a: TreeAnalysis) -> None:
        st = _stats_from_analysis(t, a)
        for name, value in zip(RAW_COLUMNS, st.as_row()):
            sums[name].add(value)
        sums["max_out_degree"].add(st.max_out_degree)
        for k, v in st.degree_hist.items():
            deg_hist[k] = deg_hist.get(k, 0) + v
        if rows is not None:
            rows.append(st.as_row())

    if kind == "cayley":
        for _ in range(count):
            t = sample_cayley(n, rng)
            record(t, _analyze(t))
    else:
        t = star_tree(n)
        a = _analyze(t)

        def step(t: RootedTree, a: TreeAnalysis) -> tuple:
            p = AutomorphismPartition(n=n, orbit=tuple(a.orbit),
                                      n_orbits=max(a.orbit[1:]) + 1,
                                      rigid=tuple(a.rigid))
            s = uniform_automorphism(t, p, rng)
            t2 = uniform_invariant_tree(s, rng)
            return t2, _analyze(t2)

        for _ in range(burnin):
            t, a = step(t, a)
        for i in range(count):
            record(t, a)
            if i + 1 < count:
                t, a = step(t, a)
    return sums, deg_hist, rows


def batch_summary(kind: str, n: int, samples: int, burnin: int | None = None,
                  seed: int | None = None, threads: int = 1,
                  raw_path=None, chunk: int = DEFAULT_CHUNK) -> BatchSummary:
    """Aggregate features of ``samples`` random trees on n vertices.

    kind "cayley" draws independent uniform labeled trees; kind "polya"
    records consecutive chain states after per-chunk burn-in (default 20).
    Fixed (seed, samples) gives identical output for any thread count.
    ``raw_path`` additionally writes one CSV row per sample.
    """
    if kind not in ("polya", "cayley"):
        raise ValueError(f"unknown kind {kind!r}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if kind == "cayley":
        if burnin is not None:
            raise ValueError("burn-in applies only to the chain sampler")
    elif burnin is None:
        burnin = 20
    want_raw = raw_path is not None

    jobs = [(kind, n, size, burnin, seed, idx, want_raw)
            for idx, size in enumerate(_chunk_sizes(samples, chunk))]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]

    sums = _new_feature_summaries()
    deg_hist: dict = {}
    raw_rows = [] if want_raw else None
    for part_sums, part_deg, part_rows in results:     # fixed chunk order
        for name in sums:
            sums[name].merge(part_sums[name])
        for k, v in part_deg.items():
            deg_hist[k] = deg_hist.get(k, 0) + v
        if raw_rows is not None:
            raw_rows.extend(part_rows)

    if want_raw:
        with open(raw_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RAW_COLUMNS)
            for row in raw_rows:
                w.writerow([f"{row[-1]:.6f}" if i == len(row) - 1 else row[i]
                            for i in range(len(row))])
    return BatchSummary(kind=kind, n=n, samples=samples, burnin=burnin,
                        seed=seed, features=sums, degree_hist=deg_hist)


def degree_fractions(kind: str, n: int, samples: int, seed: int | None = None,
                     threads: int = 1, burnin: int | None = None,
                     up_to: int = 10) -> list:
    """Mean fraction of vertices of each undirected degree 1..up_to."""
    summary = batch_summary(kind, n, samples, burnin=burnin, seed=seed,
                            threads=threads)
    return [summary.degree_fraction(k) for k in range(1, up_to + 1)]
