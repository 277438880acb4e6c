"""Command-line front end.

Subcommands: sample, count, validate, constants, refdist, stats, encode,
decode, rerun.  Every file-writing run drops a JSON manifest next to the
output recording the exact argv, the seed actually used, and the library
version; `rerun --manifest FILE` replays it and reproduces the data file
byte for byte.

Exit codes: 0 success, 1 validation failure, 2 usage error.

Formats (all UTF-8, LF line endings):
  parent-list   one line "n", then one line of n whitespace-separated
                integers, entry i the parent of vertex i+1 (0 = root)
  code          one classical code per line, whitespace-separated integers
  CSV           header row, fixed 6-decimal floats
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time

import numpy as np

from . import __version__, seeding
from .burnside import ChainConfig, sample_polya
from .counting import count_invariant_trees_type, f_count, polya_counts
from .prufer import cayley_decode, cayley_encode, sample_cayley
from .stats import RAW_COLUMNS, batch_summary, compute_stats
from .treecore import CycleIndex, Permutation, ahu_canonical, build_tree

USAGE_ERROR = 2


def _default_threads() -> int:
    return int(os.environ.get("POLYATREE_THREADS", "1"))


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    return int(np.random.SeedSequence().entropy % (2 ** 63))


def _write_manifest(out_path: str, argv: list, seed: int, threads: int,
                    started: float) -> None:
    manifest = {
        "argv": argv,
        "seed": seed,
        "threads": threads,
        "version": __version__,
        "output": os.path.basename(out_path),
        "duration_s": round(time.time() - started, 3),
    }
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


class _Out:
    """stdout or a file, uniformly."""

    def __init__(self, path: str | None):
        self.path = path
        self.fh = open(path, "w", newline="") if path else sys.stdout

    def close(self):
        if self.path:
            self.fh.close()

    def write(self, text: str):
        self.fh.write(text)


# --------------------------------------------------------------------------
# sample
# --------------------------------------------------------------------------

def _cmd_sample(args, argv) -> int:
    if args.kind == "cayley" and args.burnin is not None:
        print("error: --burnin applies only to --kind polya", file=sys.stderr)
        return USAGE_ERROR
    seed = _resolve_seed(args.seed)
    started = time.time()
    burnin = 20 if args.burnin is None else args.burnin
    out = _Out(args.out)
    try:
        for i in range(args.count):
            rng = seeding.stream_rng(seed, i)
            if args.kind == "cayley":
                t = sample_cayley(args.n, rng)
            else:
                t = sample_polya(ChainConfig(n=args.n, burnin=burnin), rng)
            if args.format == "parentlist":
                out.write(f"{t.n}\n")
                out.write(" ".join(map(str, t.to_parent_list())) + "\n")
            else:
                st = compute_stats(t)
                row = st.as_row()
                if args.format == "csv":
                    if i == 0:
                        out.write(",".join(RAW_COLUMNS) + "\n")
                    vals = [str(v) for v in row[:-1]] + [f"{row[-1]:.6f}"]
                    out.write(",".join(vals) + "\n")
                else:
                    rec = dict(zip(RAW_COLUMNS, row))
                    rec["log_aut"] = round(rec["log_aut"], 6)
                    out.write(json.dumps(rec, sort_keys=True) + "\n")
    finally:
        out.close()
    if args.out:
        _write_manifest(args.out, argv, seed, 1, started)
    return 0


# --------------------------------------------------------------------------
# count
# --------------------------------------------------------------------------

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def _parse_cycles(text: str) -> list:
    if not re.fullmatch(r"\s*(\([^()]*\)\s*)*", text):
        raise ValueError(f"cannot parse cycle notation {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(text):
        elems = [int(x) for x in re.split(r"[,\s]+", body.strip()) if x]
        if elems:
            cycles.append(elems)
    return cycles


def _parse_cycle_type(text: str) -> dict:
    lam = {}
    for part in re.split(r"[,\s]+", text.strip()):
        if not part:
            continue
        m = re.fullmatch(r"(\d+)(?:\^(\d+))?", part)
        if not m:
            raise ValueError(f"cannot parse cycle-type term {part!r}")
        d = int(m.group(1))
        k = int(m.group(2)) if m.group(2) else 1
        lam[d] = lam.get(d, 0) + k
    return lam


def _cmd_count(args, argv) -> int:
    try:
        if args.perm is not None:
            cycles = _parse_cycles(args.perm)
            touched = max((max(c) for c in cycles), default=1)
            n = args.n if args.n else touched
            s = Permutation.from_cycles(n, cycles)
            if s.image[1] != 1:
                print("error: permutation does not fix 1", file=sys.stderr)
                return USAGE_ERROR
            idx = s.cycle_type
        else:
            lam = _parse_cycle_type(args.cycle_type)
            n = sum(d * k for d, k in lam.items())
            if args.n and args.n != n:
                print(f"error: cycle type sums to {n}, not --n {args.n}",
                      file=sys.stderr)
                return USAGE_ERROR
            if lam.get(1, 0) < 1:
                print("error: cycle type has no fixed point, cannot fix 1",
                      file=sys.stderr)
                return USAGE_ERROR
            idx = CycleIndex.from_lambda(n, lam)
        total = count_invariant_trees_type(idx)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    print(total)
    if args.formula:
        lam1 = idx.lam.get(1, 0)
        parts = [f"{lam1}^{lam1 - 2}" if lam1 >= 3 else "1"]
        for d in sorted(idx.lam):
            if d == 1:
                continue
            lam_d, mu_d = idx.lam[d], idx.mu[d]
            parts.append(f"f({lam_d},{d},{mu_d})={f_count(lam_d, d, mu_d)}")
        print(" * ".join(parts))
    return 0


# --------------------------------------------------------------------------
# validate
# --------------------------------------------------------------------------

def _check(name: str, ok: bool, detail: str = "") -> bool:
    tag = "ok" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"[{tag}] {name}{suffix}")
    return ok


def _cmd_validate(args, argv) -> int:
    from collections import Counter
    from itertools import permutations as iperms

    from .counting import count_invariant_trees
    from .oracle import enumerate_trees
    from .prufer import (prufer_decode_decorated, prufer_encode_decorated,
                         sigma_prufer_decode, sigma_prufer_encode)

    rng = seeding.master_rng(20_240_001)
    ok = True

    counts = polya_counts(10)
    ok &= _check("unlabeled counts t_1..t_10",
                 counts == [1, 1, 2, 4, 9, 20, 48, 115, 286, 719],
                 str(counts))

    good = True
    for _ in range(2000):
        n = int(rng.integers(2, 60))
        t = sample_cayley(n, rng)
        good &= cayley_decode(cayley_encode(t), n) == t
    ok &= _check("classical code round trips (2000 random)", good)

    good = True
    for _ in range(500):
        m = int(rng.integers(1, 12))
        seq = []
        for i in range(m):
            j = 0 if i == m - 1 else int(rng.integers(0, m + 1))
            seq.append((j, int(rng.integers(0, 3))))
        good &= prufer_encode_decorated(prufer_decode_decorated(seq)) == seq
    ok &= _check("decorated code round trips (500 random)", good)

    good = True
    for _ in range(300):
        n = int(rng.integers(2, 24))
        img = [1] + (1 + rng.permutation(n - 1)).tolist()
        s = Permutation.from_image([img[0]] + [v + 1 for v in img[1:]])
        from .burnside import uniform_invariant_tree
        t = uniform_invariant_tree(s, rng)
        good &= sigma_prufer_decode(sigma_prufer_encode(t, s), s) == t
    ok &= _check("blocked code round trips (300 random)", good)

    samples = 20_000
    cc = Counter()
    for i in range(samples):
        t = sample_polya(ChainConfig(n=4, burnin=20),
                         seeding.stream_rng(77, i))
        cc[ahu_canonical(t).root_code] += 1
    freqs = sorted(v / samples for v in cc.values())
    ok &= _check("n=4 chain uniformity (20k samples, 0.25 +- 0.02)",
                 len(cc) == 4 and all(abs(f - 0.25) < 0.02 for f in freqs),
                 " ".join(f"{f:.3f}" for f in freqs))

    if args.level == "full":
        good = True
        detail = ""
        for n in range(3, 8):
            trees = [t.parent for t in enumerate_trees(n)]
            for rest in iperms(range(2, n + 1)):
                s = Permutation.from_image([1] + list(rest))
                img = s.image
                brute = 0
                for p in trees:
                    inv = True
                    for v in range(2, n + 1):
                        if p[img[v]] != img[p[v]]:
                            inv = False
                            break
                    brute += inv
                if brute != count_invariant_trees(s):
                    good = False
                    detail = f"mismatch at n={n}, {s!r}"
                    break
        ok &= _check("invariant-tree formula vs enumeration (n=3..7)",
                     good, detail)

        from scipy.stats import chisquare
        samples = 20_000
        cc = Counter()
        for i in range(samples):
            t = sample_polya(ChainConfig(n=8, burnin=20),
                             seeding.stream_rng(78, i))
            cc[ahu_canonical(t).root_code] += 1
        if len(cc) == 115:
            stat, p = chisquare(list(cc.values()))
            ok &= _check("n=8 chain chi-square over 115 classes (p > 0.001)",
                         p > 0.001, f"p={p:.4f}")
        else:
            ok &= _check("n=8 chain reaches all 115 classes", False,
                         f"saw {len(cc)}")

    print("validation " + ("PASSED" if ok else "FAILED"))
    return 0 if ok else 1


# --------------------------------------------------------------------------
# constants / refdist / stats
# --------------------------------------------------------------------------

def _cmd_constants(args, argv) -> int:
    from mpmath import mp

    from .constants import compute_constants
    digits = args.digits
    started = time.time()
    c = compute_constants(trunc_n=args.trunc_n, precision=args.precision)
    out = _Out(args.out)
    try:
        with mp.workdps(args.precision):
            out.write(f"rho = {mp.nstr(c.rho, digits)}\n")
            out.write(f"b = {mp.nstr(c.b, digits)}\n")
            out.write(f"sigma = {mp.nstr(c.sigma, digits)}\n")
    finally:
        out.close()
    if args.out:
        _write_manifest(args.out, argv, 0, 1, started)
    return 0


def _cmd_refdist(args, argv) -> int:
    from .refdist import (MaxDegreeLaw, airy_area_density, excursion_max_cdf,
                          max_degree_cdf)
    started = time.time()
    out = _Out(args.out)
    try:
        if args.dist == "maxdeg":
            if not args.n:
                print("error: --dist maxdeg requires --n", file=sys.stderr)
                return USAGE_ERROR
            law = MaxDegreeLaw(n=args.n, c=args.c)
            m_max = args.m_max or int(
                math.log(args.n * law.c * 700) / math.log(1 / law.rho)) + 2
            out.write("m,cdf\n")
            for m in range(1, m_max + 1):
                out.write(f"{m},{max_degree_cdf(law, m):.6f}\n")
        else:
            fn = (excursion_max_cdf if args.dist == "excursion-max"
                  else airy_area_density)
            col = "cdf" if args.dist == "excursion-max" else "density"
            out.write(f"x,{col}\n")
            for i in range(args.points):
                x = args.x_min + (args.x_max - args.x_min) * i / (args.points - 1)
                out.write(f"{x:.6f},{fn(x):.6f}\n")
    finally:
        out.close()
    if args.out:
        _write_manifest(args.out, argv, 0, 1, started)
    return 0


def _cmd_stats(args, argv) -> int:
    if args.kind == "cayley" and args.burnin is not None:
        print("error: --burnin applies only to --kind polya", file=sys.stderr)
        return USAGE_ERROR
    seed = _resolve_seed(args.seed)
    threads = args.threads if args.threads else _default_threads()
    started = time.time()
    summary = batch_summary(args.kind, args.n, args.count, burnin=args.burnin,
                            seed=seed, threads=threads, raw_path=args.raw)
    out = _Out(args.out)
    try:
        if args.degrees:
            out.write("degree,fraction\n")
            for k in range(1, 11):
                out.write(f"{k},{summary.degree_fraction(k):.6f}\n")
        else:
            doc = {
                "kind": summary.kind,
                "n": summary.n,
                "samples": summary.samples,
                "burnin": summary.burnin,
                "seed": seed,
                "features": {
                    name: {
                        "mean": round(fs.mean, 6),
                        "sd": round(fs.sd, 6),
                        "min": fs.min,
                        "max": fs.max,
                    }
                    for name, fs in summary.features.items()
                },
                "normalized": {k: [round(v[0], 6), round(v[1], 6)]
                               for k, v in summary.normalized().items()},
                "degree_fractions": {
                    str(k): round(summary.degree_fraction(k), 6)
                    for k in range(1, 11)
                },
            }
            out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    finally:
        out.close()
    if args.out:
        _write_manifest(args.out, argv, seed, threads, started)
    if args.raw:
        _write_manifest(args.raw, argv, seed, threads, started)
    return 0


# --------------------------------------------------------------------------
# encode / decode / rerun
# --------------------------------------------------------------------------

def _read_lines(path: str | None):
    fh = open(path) if path else sys.stdin
    try:
        yield from fh
    finally:
        if path:
            fh.close()


def _cmd_decode(args, argv) -> int:
    out = _Out(args.out)
    started = time.time()
    try:
        for line in _read_lines(args.infile):
            line = line.strip()
            if not line:
                continue
            code = [int(x) for x in line.split()]
            t = cayley_decode(code)
            out.write(f"{t.n}\n")
            out.write(" ".join(map(str, t.to_parent_list())) + "\n")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    finally:
        out.close()
    if args.out:
        _write_manifest(args.out, argv, 0, 1, started)
    return 0


def _cmd_encode(args, argv) -> int:
    out = _Out(args.out)
    started = time.time()
    try:
        lines = [ln.strip() for ln in _read_lines(args.infile) if ln.strip()]
        i = 0
        while i < len(lines):
            n = int(lines[i])
            parent = [int(x) for x in lines[i + 1].split()]
            if len(parent) != n:
                raise ValueError(f"expected {n} parents, got {len(parent)}")
            t = build_tree(parent)
            out.write(" ".join(map(str, cayley_encode(t))) + "\n")
            i += 2
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    finally:
        out.close()
    if args.out:
        _write_manifest(args.out, argv, 0, 1, started)
    return 0


def _cmd_rerun(args, argv) -> int:
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    replay = list(manifest["argv"])
    if replay and replay[0] in ("sample", "stats") and "--seed" not in replay:
        replay += ["--seed", str(manifest["seed"])]
    return main(replay)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polyatree",
        description="Uniform sampling and exact counting for labeled and "
                    "unlabeled rooted trees.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="draw random trees")
    sp.add_argument("--kind", choices=["polya", "cayley"], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--burnin", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--format", choices=["parentlist", "csv", "json"],
                    default="parentlist")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_sample)

    cp = sub.add_parser("count", help="exact invariant-tree count")
    g = cp.add_mutually_exclusive_group(required=True)
    g.add_argument("--perm", help='cycle notation, e.g. "(2,3)(4,5)"')
    g.add_argument("--cycle-type", dest="cycle_type",
                   help='e.g. "1^2 2^1" (d^multiplicity terms)')
    cp.add_argument("--n", type=int, default=None)
    cp.add_argument("--formula", action="store_true",
                    help="also print the product factorization")
    cp.set_defaults(func=_cmd_count)

    vp = sub.add_parser("validate", help="run built-in consistency checks")
    vp.add_argument("--level", choices=["quick", "full"], default="quick")
    vp.set_defaults(func=_cmd_validate)

    kp = sub.add_parser("constants", help="singularity constants rho, b, sigma")
    kp.add_argument("--digits", type=int, default=12)
    kp.add_argument("--trunc-n", dest="trunc_n", type=int, default=40)
    kp.add_argument("--precision", type=int, default=60)
    kp.add_argument("--out", default=None)
    kp.set_defaults(func=_cmd_constants)

    rp = sub.add_parser("refdist", help="tabulate a reference distribution")
    rp.add_argument("--dist", choices=["excursion-max", "airy-area", "maxdeg"],
                    required=True)
    rp.add_argument("--n", type=int, default=None, help="for --dist maxdeg")
    rp.add_argument("--c", type=float, default=1.1103)
    rp.add_argument("--m-max", dest="m_max", type=int, default=None)
    rp.add_argument("--x-min", dest="x_min", type=float, default=0.05)
    rp.add_argument("--x-max", dest="x_max", type=float, default=3.0)
    rp.add_argument("--points", type=int, default=296)
    rp.add_argument("--out", default=None)
    rp.set_defaults(func=_cmd_refdist)

    tp = sub.add_parser("stats", help="batch feature aggregation")
    tp.add_argument("--kind", choices=["polya", "cayley"], required=True)
    tp.add_argument("--n", type=int, required=True)
    tp.add_argument("--count", type=int, required=True)
    tp.add_argument("--burnin", type=int, default=None)
    tp.add_argument("--seed", type=int, default=None)
    tp.add_argument("--threads", type=int, default=None)
    tp.add_argument("--degrees", action="store_true",
                    help="emit the degree-fraction table instead of the summary")
    tp.add_argument("--raw", default=None,
                    help="also write one CSV row per sample to this path")
    tp.add_argument("--out", default=None)
    tp.set_defaults(func=_cmd_stats)

    dp = sub.add_parser("decode", help="classical codes -> parent lists")
    dp.add_argument("--in", dest="infile", default=None)
    dp.add_argument("--out", default=None)
    dp.set_defaults(func=_cmd_decode)

    ep = sub.add_parser("encode", help="parent lists -> classical codes")
    ep.add_argument("--in", dest="infile", default=None)
    ep.add_argument("--out", default=None)
    ep.set_defaults(func=_cmd_encode)

    mp_ = sub.add_parser("rerun", help="replay a run from its manifest")
    mp_.add_argument("--manifest", required=True)
    mp_.set_defaults(func=_cmd_rerun)
    return p


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args, argv)


if __name__ == "__main__":
    sys.exit(main())
