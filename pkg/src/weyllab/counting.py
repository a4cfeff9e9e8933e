"""Spectral counting N(t), Weyl main term, remainder R(t) and mean-square law.

count_spectrum evaluates N(t) in O(sqrt(t)) integer operations using the
closed-form binomial sum over n1 (partial sums of the class-II multiplicity
are binomial coefficients) plus a cached representation-count table for the
torus part.  brute_force_N is the independent oracle: plain double loops and
direct lattice-vector enumeration, sharing no code with the fast path.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CutoffExceeded, DomainError
from .manifold import (
    FOUR_PI_SQ,
    TWO_PI,
    ManifoldParams,
    _k_max,
    enumerate_class1,
    enumerate_class2,
    rep_counts,
)

#: brute_force_N refuses t above this unless the caller raises the cutoff
BRUTE_FORCE_CUTOFF = 1.0e4

#: fixed chunk length for the threaded n0 partition (thread-count independent)
_N0_CHUNK = 4096

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class CountingResult:
    """N(t), the Weyl main term and the remainder at a single t."""

    t: float
    n_of_t: int
    main_term: float
    remainder: float
    normalized: float  # remainder / t^(ell - 1/4)


@dataclass(frozen=True)
class MeanSquareReport:
    """Cumulative integral of R(t)^2 on a t-grid with its log-log fit."""

    t_grid: np.ndarray
    integral_values: np.ndarray
    fitted_slope: float
    fitted_log_constant: float
    local_slopes: np.ndarray


def weyl_coefficient(params: ManifoldParams) -> float:
    """Coefficient c in the main term c * t^(ell + 1/2)."""
    ell = params.ell
    return params.r_product / (
        2.0 ** (2 * ell + 0.5) * math.pi ** ell * math.gamma(ell + 1.5)
    )


def weyl_main_term(params: ManifoldParams, t: float) -> float:
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    return weyl_coefficient(params) * t ** (params.ell + 0.5)


def _count_class2_range(params: ManifoldParams, x: float, n0_lo: int, n0_hi: int) -> int:
    """Weighted class-II count for n0 in [n0_lo, n0_hi)."""
    ell = params.ell
    total = 0
    for n0 in range(n0_lo, n0_hi):
        if n0 * n0 + n0 * ell > x:
            break
        # largest n1 with n0^2 + n0*(2*n1 + ell) <= x
        n1 = int((x / n0 - n0 - ell) // 2) if x / n0 - n0 - ell >= 0 else -1
        while n0 * n0 + n0 * (2 * (n1 + 1) + ell) <= x:
            n1 += 1
        while n1 >= 0 and n0 * n0 + n0 * (2 * n1 + ell) > x:
            n1 -= 1
        if n1 < 0:
            continue
        # sum of C(n1 + ell - 1, ell - 1) over 0..n1 telescopes to C(n1 + ell, ell)
        total += 2 * n0 ** ell * params.r_product * math.comb(n1 + ell, ell)
    return total


def count_class2(params: ManifoldParams, t: float, threads: int = 1) -> int:
    """Total class-II multiplicity with eigenvalue <= t."""
    x = t / TWO_PI
    n0_top = math.isqrt(max(int(x), 0)) + 2
    if threads <= 1 or n0_top <= _N0_CHUNK:
        return _count_class2_range(params, x, 1, n0_top)
    bounds = list(range(1, n0_top, _N0_CHUNK)) + [n0_top]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(
            pool.map(
                lambda ab: _count_class2_range(params, x, ab[0], ab[1]),
                zip(bounds[:-1], bounds[1:]),
            )
        )
    return sum(parts)


def count_class1(params: ManifoldParams, t: float, torus_lattice: str = "standard") -> int:
    """Total class-I multiplicity with eigenvalue <= t (k = 0 included)."""
    if torus_lattice != "standard":
        return sum(ln.multiplicity for ln in enumerate_class1(params, t, torus_lattice))
    k_hi = _k_max(t / FOUR_PI_SQ)
    if k_hi < 0:
        return 0
    table = rep_counts(2 * params.ell, k_hi).counts
    return int(np.sum(table[: k_hi + 1]))


def count_spectrum(
    params: ManifoldParams,
    t: float,
    threads: int = 1,
    torus_lattice: str = "standard",
) -> CountingResult:
    """Exact N(t) with main term and remainder."""
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    n = count_class1(params, t, torus_lattice) + count_class2(params, t, threads)
    main = weyl_main_term(params, t)
    rem = n - main
    return CountingResult(
        t=t,
        n_of_t=n,
        main_term=main,
        remainder=rem,
        normalized=rem / t ** (params.ell - 0.25),
    )


def _enum_ball(dim: int, K: int) -> int:
    """#{m in Z^dim : |m|^2 <= K} by direct nested enumeration."""
    if K < 0:
        return 0
    if dim == 1:
        return 2 * math.isqrt(K) + 1
    total = 0
    for m in range(-math.isqrt(K), math.isqrt(K) + 1):
        total += _enum_ball(dim - 1, K - m * m)
    return total


def brute_force_N(params: ManifoldParams, t: float, cutoff: float = BRUTE_FORCE_CUTOFF) -> int:
    """Independent N(t) oracle: plain loops, no shared code with count_spectrum."""
    if t > cutoff:
        raise CutoffExceeded(f"brute force limited to t <= {cutoff}, got {t}")
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    ell = params.ell
    # class I: every lattice vector with |m|^2 <= t/(4 pi^2)
    x1 = t / FOUR_PI_SQ
    K = int(math.floor(x1))
    while K + 1 <= x1:
        K += 1
    while K >= 0 and K > x1:
        K -= 1
    total = _enum_ball(2 * ell, K)
    # class II: double loop over (n0, n1)
    x2 = t / TWO_PI
    n0 = 1
    while n0 * n0 + n0 * ell <= x2:
        n1 = 0
        while n0 * n0 + n0 * (2 * n1 + ell) <= x2:
            total += 2 * n0 ** ell * params.r_product * math.comb(n1 + ell - 1, ell - 1)
            n1 += 1
        n0 += 1
    return total


def error_normalizer(params: ManifoldParams) -> float:
    """Prefactor 2^(ell-2)*(ell-1)!/r_product linking R(2*pi*u^2) to E(u)."""
    return 2.0 ** (params.ell - 2) * math.factorial(params.ell - 1) / params.r_product


def normalized_error_E(params: ManifoldParams, u: float, threads: int = 1) -> float:
    """Normalized remainder E(u) = error_normalizer * R(2*pi*u^2)."""
    if u < 1:
        raise DomainError(f"u must be >= 1, got {u}")
    res = count_spectrum(params, TWO_PI * u * u, threads=threads)
    return error_normalizer(params) * res.remainder


def spectral_jumps(params: ManifoldParams, t_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Distinct eigenvalues <= t_max and cumulative counts N at each jump."""
    lines = enumerate_class1(params, t_max) + enumerate_class2(params, t_max)
    lam = np.array([ln.eigenvalue for ln in lines])
    mult = np.array([ln.multiplicity for ln in lines], dtype=np.int64)
    order = np.argsort(lam, kind="stable")
    lam, mult = lam[order], mult[order]
    distinct, inverse = np.unique(lam, return_inverse=True)
    merged = np.zeros(len(distinct), dtype=np.int64)
    np.add.at(merged, inverse, mult)
    return distinct, np.cumsum(merged)


def _piece_integrals(starts, stops, n_values, coeff, power):
    """Integral of (N - coeff*t^power)^2 per piece, 8-point Gauss-Legendre."""
    half = 0.5 * (stops - starts)
    mid = 0.5 * (stops + starts)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    integrand = (n_values[:, None] - coeff * nodes ** power) ** 2
    return half * (integrand @ _GL_WEIGHTS)


def mean_square(params: ManifoldParams, t_max: float, grid_size: int) -> MeanSquareReport:
    """Cumulative integral of R(t)^2 and its log-log growth fit.

    The integrand is integrated exactly piecewise: N is constant between
    eigenvalue jumps, so each piece is a smooth (N - c*t^(ell+1/2))^2 handled
    by fixed-order quadrature.  The fit uses the upper half of the grid to
    suppress the secondary term.
    """
    if t_max < 100:
        raise DomainError(f"t_max must be >= 100, got {t_max}")
    if grid_size < 10:
        raise DomainError(f"grid_size must be >= 10, got {grid_size}")
    jumps, cum_n = spectral_jumps(params, t_max)
    coeff = weyl_coefficient(params)
    power = params.ell + 0.5

    bounds = np.append(jumps, t_max)
    starts, stops = bounds[:-1], bounds[1:]
    n_vals = cum_n.astype(np.float64)
    piece = _piece_integrals(starts, stops, n_vals, coeff, power)
    prefix = np.concatenate([[0.0], np.cumsum(piece)])

    t_grid = np.linspace(t_max / grid_size, t_max, grid_size)
    idx = np.searchsorted(jumps, t_grid, side="right") - 1
    partial = _piece_integrals(jumps[idx], t_grid, n_vals[idx], coeff, power)
    integral = prefix[idx] + partial

    logs_t = np.log(t_grid)
    logs_i = np.log(integral)
    top = grid_size // 2
    slope, intercept = np.polyfit(logs_t[top:], logs_i[top:], 1)

    local = np.full(grid_size, np.nan)
    local[1:] = np.diff(logs_i) / np.diff(logs_t)
    return MeanSquareReport(
        t_grid=t_grid,
        integral_values=integral,
        fitted_slope=float(slope),
        fitted_log_constant=float(intercept),
        local_slopes=local,
    )
