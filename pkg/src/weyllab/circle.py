"""Gaussian circle problem baseline: exact lattice point counts, the
discrepancy P(x), and Cramer's mean-square growth law.

Counts use exact integer comparisons a^2 + b^2 <= R.  The radius square R
is the nearest integer to x*x when x sits at (floating-point distance of) a
jump radius sqrt(k), otherwise floor(x*x); this makes counts bit-exact at
jump points (closed boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityExceeded, DomainError

#: per-row counting is O(x); keep single evaluations interactive
MAX_SINGLE_X = 1.0e6

#: cap on lattice-point work for the mean-square integrator (~pi/4 * x_max^2)
MAX_MEAN_SQUARE_K = 6 * 10 ** 8

_BLOCK = 1 << 24

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class CircleSample:
    x: float
    count: int
    p_value: float  # count - pi * x^2


@dataclass(frozen=True)
class CramerReport:
    """Cumulative integral of P(x)^2 on an x-grid with its log-log fit."""

    x_grid: np.ndarray
    integral_values: np.ndarray
    slope: float
    log_constant: float
    local_slopes: np.ndarray


def radius_squared_int(x: float) -> int:
    """Integer radius-square for the closed disc of radius x (see module doc)."""
    if x <= 0:
        raise DomainError(f"x must be positive, got {x}")
    sq = x * x
    near = round(sq)
    if abs(sq - near) <= 8.0 * math.ulp(sq):
        return int(near)
    return int(math.floor(sq))


def _isqrt_vec(v: np.ndarray) -> np.ndarray:
    """Vectorized floor(sqrt(v)) for nonnegative int64 v < 2^53."""
    s = np.sqrt(v.astype(np.float64)).astype(np.int64)
    s -= (s * s > v).astype(np.int64)
    s += ((s + 1) * (s + 1) <= v).astype(np.int64)
    return s


def circle_count(x: float) -> CircleSample:
    """Exact lattice point count of the closed disc of radius x, by rows."""
    if x > MAX_SINGLE_X:
        raise DomainError(f"circle_count limited to x <= {MAX_SINGLE_X}, got {x}")
    R = radius_squared_int(x)
    a = np.arange(-math.isqrt(R), math.isqrt(R) + 1, dtype=np.int64)
    count = int(np.sum(2 * _isqrt_vec(R - a * a) + 1))
    return CircleSample(x=x, count=count, p_value=count - math.pi * x * x)


def _block_r2(k0: int, k1: int) -> np.ndarray:
    """r_2(k) for k in [k0, k1) via one bincount per symmetry weight."""
    length = k1 - k0
    idx_by_weight: dict[int, list[np.ndarray]] = {1: [], 2: [], 4: []}
    a_hi = math.isqrt(max(k1 - 1, 0))
    for a in range(a_hi + 1):
        rem_hi = k1 - 1 - a * a
        if rem_hi < 0:
            break
        b_hi = math.isqrt(rem_hi)
        b_lo = 0
        if k0 > a * a:
            b_lo = math.isqrt(k0 - 1 - a * a) + 1 if k0 - 1 >= a * a else 0
        if b_lo > b_hi:
            continue
        b = np.arange(b_lo, b_hi + 1, dtype=np.int64)
        idx = a * a + b * b - k0
        if b_lo == 0:
            w0 = 1 if a == 0 else 2
            idx_by_weight[w0].append(idx[:1])
            idx = idx[1:]
        w = 2 if a == 0 else 4
        if idx.size:
            idx_by_weight[w].append(idx)
    table = np.zeros(length, dtype=np.int64)
    for w, chunks in idx_by_weight.items():
        if chunks:
            allidx = np.concatenate(chunks)
            table += w * np.bincount(allidx, minlength=length)
    return table


def _piece_integrals_y(k: np.ndarray, d: np.ndarray, y_hi: np.ndarray) -> np.ndarray:
    """Integral of (D - pi*y)^2 / (2 sqrt(k+y)) over y in [0, y_hi] per piece.

    This is the x-space piece integral of (C - pi x^2)^2 written in
    y = x^2 - k, which avoids the cancellation of the naive antiderivative.
    """
    out = np.zeros(len(k))
    for node, wt in zip(_GL_NODES, _GL_WEIGHTS):
        y = y_hi * 0.5 * (node + 1.0)
        out += wt * (d - math.pi * y) ** 2 / (2.0 * np.sqrt(k + y))
    return out * 0.5 * y_hi


def _piece_integral_x0(c0: float, x_hi: float) -> float:
    """Integral of (c0 - pi x^2)^2 over [0, x_hi] (the k = 0 piece)."""
    x = x_hi * 0.5 * (_GL_NODES + 1.0)
    return float(0.5 * x_hi * np.sum(_GL_WEIGHTS * (c0 - math.pi * x * x) ** 2))


def cramer_mean_square(x_max: float, grid_size: int = 100) -> CramerReport:
    """Stream the exact piecewise integral of P(x)^2 up to x_max.

    P is constant between consecutive jump radii sqrt(k), so the integral
    splits into one smooth piece per integer k <= x_max^2; r_2 tables are
    produced blockwise to bound memory.
    """
    if x_max < 1.0e3:
        raise DomainError(f"x_max must be >= 1e3, got {x_max}")
    if grid_size < 10:
        raise DomainError(f"grid_size must be >= 10, got {grid_size}")
    k_top = int(math.floor(x_max * x_max))
    while k_top + 1 <= x_max * x_max:
        k_top += 1
    if k_top > MAX_MEAN_SQUARE_K:
        raise CapacityExceeded(
            f"x_max = {x_max} requires {k_top} pieces, above {MAX_MEAN_SQUARE_K}"
        )

    x_grid = np.linspace(x_max / grid_size, x_max, grid_size)
    grid_k = np.floor(x_grid * x_grid).astype(np.int64)
    grid_k += ((grid_k + 1) <= x_grid * x_grid).astype(np.int64)
    integral = np.zeros(grid_size)

    running = 0.0  # integral over all full pieces below the current block
    carry = 0  # lattice count below the current block
    g = 0  # next grid point to emit
    for k0 in range(0, k_top + 1, _BLOCK):
        k1 = min(k0 + _BLOCK, k_top + 1)
        table = _block_r2(k0, k1)
        counts = carry + np.cumsum(table)
        carry = int(counts[-1])
        ks = np.arange(k0, k1, dtype=np.float64)
        d = counts.astype(np.float64) - math.pi * ks
        pieces = _piece_integrals_y(ks, d, np.ones(k1 - k0))
        if k0 == 0:
            pieces[0] = _piece_integral_x0(float(counts[0]), 1.0)
        prefix = running + np.concatenate([[0.0], np.cumsum(pieces)])
        while g < grid_size and grid_k[g] < k1:
            k = int(grid_k[g])
            x = float(x_grid[g])
            if k == 0:
                part = _piece_integral_x0(float(counts[0]), x)
            else:
                y_hi = x * x - k
                part = float(
                    _piece_integrals_y(
                        np.array([float(k)]), d[k - k0: k - k0 + 1], np.array([y_hi])
                    )[0]
                )
            integral[g] = prefix[k - k0] + part
            g += 1
        running = prefix[-1]

    logs_x = np.log(x_grid)
    logs_i = np.log(integral)
    top = grid_size // 2
    slope, intercept = np.polyfit(logs_x[top:], logs_i[top:], 1)
    local = np.full(grid_size, np.nan)
    local[1:] = np.diff(logs_i) / np.diff(logs_x)
    return CramerReport(
        x_grid=x_grid,
        integral_values=integral,
        slope=float(slope),
        log_constant=float(intercept),
        local_slopes=local,
    )
