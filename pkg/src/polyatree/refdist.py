"""Analytic reference distributions for the scaled tree features.

Double precision throughout (unlike the constants module).  Three laws:

* ``excursion_max_cdf``: distribution of the maximum of a standard
  Brownian excursion, the scaling limit of height/sqrt(n).  Evaluated by
  the theta-type series 1 - 2*sum_k (4k^2x^2 - 1)exp(-2k^2x^2).
* ``airy_area_density``: distribution of the integral of the excursion
  (the Airy area law), the limit of path_length/n^(3/2).  Evaluated by
  the Airy-zero eigen-series with Kummer U factors.
* ``max_degree_cdf``: the doubly-exponential-style law
  P(max degree <= m) = exp(-c*n*rho^m) governing the maximum degree of a
  random unlabeled rooted tree.

The fitted comparisons in the batch experiments use ``fit_excursion_scale``,
which estimates the location/scale pair matching a height sample against
the excursion-max law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "RHO_16",
    "AIRY_AI_ZEROS",
    "MaxDegreeLaw",
    "excursion_max_cdf",
    "airy_area_density",
    "max_degree_cdf",
    "max_degree_quantile",
    "qq_pairs",
    "fit_excursion_scale",
]

# 16-digit value of the tree-count singularity (see constants.solve_rho for
# the arbitrary-precision computation this is rounded from)
RHO_16 = 0.3383218568992077

# Magnitudes of the first 20 zeros of the Airy function Ai on the negative
# axis, 16 significant digits.  Computed once with an arbitrary-precision
# root finder; the test suite cross-checks the table against an independent
# special-function library.
AIRY_AI_ZEROS = (
    2.338107410459767,
    4.087949444130971,
    5.520559828095551,
    6.786708090071759,
    7.944133587120853,
    9.022650853340980,
    10.04017434155809,
    11.00852430373326,
    11.93601556323626,
    12.82877675286576,
    13.69148903521072,
    14.52782995177533,
    15.34075513597800,
    16.13268515694577,
    16.90563399742994,
    17.66130010569706,
    18.40113259920712,
    19.12638047424695,
    19.83812989172150,
    20.53733290767757,
)

_TERM_CUTOFF = 1e-15        # stop theta series when terms drop below this
_EXP_UNDERFLOW = 700.0      # exp(-z) below double range


def excursion_max_cdf(x: float) -> float:
    """P(max of a standard Brownian excursion <= x).

    Theta-type series 1 - 2*sum_k (4k^2x^2 - 1)exp(-2k^2x^2); below x = 1
    the Jacobi-dual form sqrt(2 pi) x^-3 sum_k (k pi)^2 exp(-(k pi)^2/(2x^2))
    of the same function is used instead, whose all-positive terms avoid
    the cancellation that makes the direct sum noisy in the left tail.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if x < 1.0:
        s = 0.0
        k = 1
        while True:
            e = (k * math.pi) ** 2 / (2.0 * x * x)
            if e > _EXP_UNDERFLOW:
                break
            s += (k * math.pi) ** 2 * math.exp(-e)
            k += 1
        return min(1.0, math.sqrt(2.0 * math.pi) / x ** 3 * s)
    s = 0.0
    k = 1
    while True:
        t = 2.0 * k * k * x * x
        if t > _EXP_UNDERFLOW:
            break
        term = (2.0 * t - 1.0) * math.exp(-t)
        s += term
        if t > 2.0 and abs(term) < _TERM_CUTOFF:
            break
        k += 1
    return min(1.0, max(0.0, 1.0 - 2.0 * s))


def _hyp1f1(a: float, b: float, z: float) -> float:
    """Kummer's confluent series; entire in z, used here with fixed small
    parameters so plain term recursion converges."""
    term = 1.0
    total = 1.0
    k = 0
    while True:
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        k += 1
        if abs(term) <= 1e-17 * max(1.0, abs(total)):
            return total
        if k > 100_000:
            raise ArithmeticError("confluent series did not converge")


def _kummer_u(a: float, b: float, z: float) -> float:
    """U(a, b; z) via its two-term 1F1 combination (b non-integer)."""
    g1 = math.gamma(1.0 - b) / math.gamma(a + 1.0 - b)
    g2 = math.gamma(b - 1.0) / math.gamma(a)
    return (g1 * _hyp1f1(a, b, z)
            + g2 * z ** (1.0 - b) * _hyp1f1(a + 1.0 - b, 2.0 - b, z))


def airy_area_density(x: float, terms: int = 20) -> float:
    """Density at x of the Brownian excursion area (Airy area law).

    Uses the first ``terms`` Airy zeros (at most 20, the embedded table).
    With all 20 terms the series is fully converged for x <= 3, which
    covers the support up to mass below 1e-13; truncation shows only in
    the far right tail where the density is negligible anyway.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if not 1 <= terms <= len(AIRY_AI_ZEROS):
        raise ValueError(f"terms must be in 1..{len(AIRY_AI_ZEROS)}")
    pref = 2.0 ** (13.0 / 6.0) * 3.0 ** (-1.5) / x ** (10.0 / 3.0)
    total = 0.0
    for i in range(terms):
        a = AIRY_AI_ZEROS[i]
        z = 2.0 * a ** 3 / (27.0 * x * x)
        if z > _EXP_UNDERFLOW:
            break
        total += math.exp(-z) * a * a * _kummer_u(-5.0 / 6.0, 4.0 / 3.0, z)
    return pref * total


@dataclass(frozen=True)
class MaxDegreeLaw:
    """Parameters of the max-degree law exp(-c*n*rho^m)."""

    n: int
    rho: float = RHO_16
    c: float = 1.1103

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ValueError("rho must be in (0, 1)")
        if self.c <= 0:
            raise ValueError("c must be positive")


def max_degree_cdf(law: MaxDegreeLaw, m: float) -> float:
    """P(max degree <= m) under the given law."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return math.exp(-law.c * law.n * law.rho ** m)


def max_degree_quantile(law: MaxDegreeLaw, u: float) -> float:
    """Continuous inverse of max_degree_cdf: the m with CDF(m) = u."""
    if not 0 < u < 1:
        raise ValueError("u must be in (0, 1)")
    return math.log(-math.log(u) / (law.c * law.n)) / math.log(law.rho)


def qq_pairs(empirical, reference_sampler, rng) -> list:
    """Quantile pairs of a sample against a reference sampler.

    Draws len(empirical) reference values with ``reference_sampler(rng)``,
    sorts both sides and zips them; deterministic under a seeded rng.
    """
    emp = sorted(float(x) for x in empirical)
    if not emp:
        raise ValueError("empty sample")
    ref = sorted(reference_sampler(rng) for _ in range(len(emp)))
    return list(zip(emp, ref))


def fit_excursion_scale(samples, max_points: int = 2000) -> tuple:
    """Location/scale fit of a height sample against the excursion-max law.

    Models P(X <= x) = M(mu_e + (sigma_e/2) * x) for the scaled heights X
    (height/sqrt(n)), so that sigma_e estimates the branching-process
    variance parameter; under the asymptotic law sigma_e would equal
    b*sqrt(rho/2) with mu_e = 0.  Returns (mu_e, sigma_e) minimizing the
    mean squared CDF discrepancy at the sample quantiles.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size == 0:
        raise ValueError("empty sample")
    if xs.size > max_points:
        idx = np.linspace(0, xs.size - 1, max_points).astype(int)
        xs = xs[idx]
    q = (np.arange(1, xs.size + 1) - 0.5) / xs.size

    def loss(params):
        mu, sigma = params
        if sigma <= 0:
            return 1e9
        vals = mu + 0.5 * sigma * xs
        if vals[0] <= 0:
            return 1e9
        model = np.array([excursion_max_cdf(v) for v in vals])
        return float(np.mean((model - q) ** 2))

    mean_ref = math.sqrt(math.pi / 2.0)      # mean of the excursion max
    sigma0 = 2.0 * mean_ref / float(xs.mean())
    best = minimize(loss, x0=[0.0, sigma0], method="Nelder-Mead",
                    options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 2000})
    mu_e, sigma_e = best.x
    return float(mu_e), float(sigma_e)
