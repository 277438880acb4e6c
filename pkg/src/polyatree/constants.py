"""Singularity constants of the rooted unlabeled tree counts.

The counts t_n grow like (b*sqrt(rho)/(2*sqrt(pi))) * n^(-3/2) * rho^(-n),
with rho the radius of convergence of the generating function t(x) and b
the square-root amplitude at the singularity.  Both are computed here to
arbitrary precision.

Method.  Truncate the system u_i = rho^i * exp(sum_{j <= n/i} u_{i*j}/j),
i = 1..n, where u_i plays the role of t(rho^i).  At the singularity the
extra equation is u_1 = 1, making n+1 equations in the n+1 unknowns
(u_1..u_n, rho); Newton's method from u_i = 0.338^i converges in a handful
of iterations.  The amplitude follows from the square-root expansion
t(x) ~ 1 - b*sqrt(rho - x): solving the same system with u_1 = 1 - eps
gives rho_eps with b ~ eps/sqrt(rho - rho_eps).  Since rho and rho_eps
carry the same truncation bias, the difference is far more accurate than
either value alone; the working rule is that b comes out with about a
third of the significant digits of rho, so the default 60-digit precision
and eps = 1e-12 support the 12 digits asserted in the acceptance tests.

The Jacobian is assembled analytically (dense, (n+1)^2 entries) and the
Newton correction solved by direct LU elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf, matrix, lu_solve, exp, sqrt

__all__ = [
    "OtterConstants",
    "solve_rho",
    "estimate_b",
    "sigma_gw",
    "compute_constants",
    "NewtonError",
]

DEFAULT_TRUNC = 40
DEFAULT_PRECISION = 60
RHO_START = "0.338"


class NewtonError(RuntimeError):
    """Newton iteration failed to reach the residual target."""


@dataclass(frozen=True)
class OtterConstants:
    """rho (singularity), b (amplitude), sigma = b*sqrt(rho/2) (the variance
    parameter of the matching branching process), with the truncation order
    and decimal precision they were computed at."""

    rho: object
    b: object
    sigma: object
    truncation: int
    precision: int


def _newton(trunc_n: int, eps, dps: int, start=None):
    """Solve the truncated system with last equation u_1 = 1 - eps.

    Returns (u, rho, iterations, residual).  ``start`` warm-starts from a
    previous (u, rho) pair.
    """
    n = trunc_n
    with mp.workdps(dps):
        eps = mpf(eps)
        if start is None:
            r0 = mpf(RHO_START)
            u = [r0 ** i for i in range(1, n + 1)]
            rho = r0
        else:
            u = [mpf(x) for x in start[0]]
            rho = mpf(start[1])
        target = mpf(1) - eps
        tol = mpf(10) ** (-(dps - 5))
        last_resid = None
        for it in range(50):
            g = []
            for i in range(1, n + 1):
                acc = mpf(0)
                for j in range(1, n // i + 1):
                    acc += u[i * j - 1] / j
                g.append(rho ** i * exp(acc))
            F = matrix(n + 1, 1)
            for i in range(n):
                F[i] = u[i] - g[i]
            F[n] = u[0] - target
            resid = max(abs(F[k]) for k in range(n + 1))
            if resid < tol:
                return u, rho, it, resid
            if last_resid is not None and resid > last_resid * 4:
                raise NewtonError(
                    f"residual diverging at iteration {it}: {resid}")
            last_resid = resid
            J = matrix(n + 1, n + 1)
            for i in range(1, n + 1):
                row = i - 1
                J[row, row] += 1
                gi = g[row]
                for j in range(1, n // i + 1):
                    J[row, i * j - 1] -= gi / j
                J[row, n] = -(i / rho) * gi
            J[n, 0] = 1
            delta = lu_solve(J, -F)
            for k in range(n):
                u[k] += delta[k]
            rho += delta[n]
        raise NewtonError(f"no convergence in 50 iterations (residual {resid})")


def solve_rho(trunc_n: int = DEFAULT_TRUNC,
              precision: int = DEFAULT_PRECISION) -> tuple:
    """Newton solve of the singular system; returns (u, rho).

    ``u[i-1]`` approximates the generating function at rho^i; rho is the
    singularity.  Truncation error decays geometrically in trunc_n; the
    default 40 supports well over 20 correct digits.
    """
    if trunc_n < 10:
        raise ValueError("trunc_n must be >= 10")
    u, rho, _, _ = _newton(trunc_n, 0, precision)
    return u, rho


def estimate_b(rho_solution: tuple, epsilon=None,
               precision: int = DEFAULT_PRECISION):
    """Amplitude b from a solved (u, rho) pair.

    Re-solves the system with u_1 = 1 - epsilon (warm-started from the
    unperturbed solution, same truncation so the truncation bias cancels)
    and returns epsilon / sqrt(rho - rho_eps).  epsilon defaults to 1e-12,
    which paired with >= 60-digit precision yields b to about 12 digits.
    """
    u, rho = rho_solution
    with mp.workdps(precision):
        eps = mpf("1e-12") if epsilon is None else mpf(epsilon)
        u_e, rho_e, _, _ = _newton(len(u), eps, precision, start=(u, rho))
        gap = mpf(rho) - rho_e
        if gap <= 0:
            raise ValueError("perturbed singularity did not decrease; "
                             "check epsilon sign/size")
        return eps / sqrt(gap)


def sigma_gw(b, rho):
    """Variance parameter b*sqrt(rho/2) of the matching branching process."""
    return b * sqrt(rho / mpf(2))


def compute_constants(trunc_n: int = DEFAULT_TRUNC,
                      precision: int = DEFAULT_PRECISION,
                      epsilon=None) -> OtterConstants:
    """rho, b and sigma in one call (see solve_rho / estimate_b)."""
    with mp.workdps(precision):
        sol = solve_rho(trunc_n, precision)
        rho = sol[1]
        if not 0 < rho < 1:
            raise NewtonError(f"rho = {rho} outside (0, 1)")
        b = estimate_b(sol, epsilon, precision)
        if b <= 0:
            raise NewtonError(f"b = {b} not positive")
        return OtterConstants(rho=rho, b=b, sigma=sigma_gw(b, rho),
                              truncation=trunc_n, precision=precision)
