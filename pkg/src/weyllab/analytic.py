"""Trigonometric-sum layer: dyadic exponential sums, their stationary-phase
transform, the frequency-space sum S(u, U), divisor-type coefficients
theta_ell(n), and Fejer-kernel averaging.

Every (h, k) term of S carries frequency sqrt(h*(2k-h)); Fejer averaging
against F_T keeps only frequencies <= T with triangle weights, which is what
makes the extremal search tractable.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .approx import VaalerCoeffs, vaaler_coeffs
from .errors import BudgetExceeded, DomainError, QuadratureFailure

#: default truncation of the k-range in D(U); K_{h,U} ~ U^2 h is astronomical
#: even at desk scale, and the neglected tail sits inside the O(1) band of the
#: Fejer-averaged identity
DEFAULT_K_CAP = 100_000

#: hard ceiling on the number of (h, k) pairs materialized for S(u, U)
DEFAULT_MAX_PAIRS = 10_000_000

_THETA_CHUNK = 2048

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def e(w):
    """e(w) = exp(2 pi i w)."""
    return np.exp(2j * math.pi * np.asarray(w, dtype=np.float64))


def sqrt_of_int(n: int) -> float:
    """Double-precision sqrt of a nonnegative integer, exact-seed refined.

    For n < 2^53 the IEEE sqrt is already correctly rounded; beyond that the
    integer-isqrt seed keeps the phase error bounded.
    """
    if n < 2 ** 53:
        return math.sqrt(n)
    r = math.isqrt(n)
    if r * r == n:
        return float(r)
    s = 0.5 * (r + n / r)
    return 0.5 * (s + n / s)


# ---------------------------------------------------------------------------
# theta coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaTable:
    ell: int
    limit: int
    values: np.ndarray  # values[n] for 0 <= n <= limit; 0 and 1 are zero


def theta_coeff(ell: int, n: int) -> float:
    """Divisor-type coefficient: sum over n = h*m, m > h, h = m (mod 2),
    of sqrt(h/m) * (1 - h/m)^(ell-1)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    total = 0.0
    for h in range(1, math.isqrt(n) + 1):
        if n % h:
            continue
        m = n // h
        if m > h and (m - h) % 2 == 0:
            total += math.sqrt(h / m) * (1.0 - h / m) ** (ell - 1)
    return total


def _theta_chunk(ell: int, limit: int, h_lo: int, h_hi: int) -> np.ndarray:
    out = np.zeros(limit + 1)
    for h in range(h_lo, h_hi):
        for m in range(h + 2, limit // h + 1, 2):
            out[h * m] += math.sqrt(h / m) * (1.0 - h / m) ** (ell - 1)
    return out


def theta_table(ell: int, limit: int, threads: int = 1) -> ThetaTable:
    """Sieve all theta values up to limit in one pass over same-parity pairs.

    Work is split into fixed h-chunks and the partial tables are combined in
    chunk order, so the result is bit-identical for any thread count.
    """
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    h_top = math.isqrt(limit) + 1
    bounds = list(range(1, h_top, _THETA_CHUNK)) + [h_top]
    spans = [(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    if threads <= 1:
        parts = [_theta_chunk(ell, limit, a, b) for a, b in spans]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: _theta_chunk(ell, limit, *ab), spans))
    values = parts[0]
    for p in parts[1:]:
        values = values + p
    values.setflags(write=False)
    return ThetaTable(ell=ell, limit=limit, values=values)


# ---------------------------------------------------------------------------
# dyadic scheme and exponential sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicScheme:
    """Dyadic splitting of 1 <= m <= u with the induced k-ranges.

    Blocks are ]M_{j+1}, M_j], M_j = u * 2^-j, j = 0..J, J minimal with
    (U-1)*2^(-J-1) < 1.  Under the phase derivative the block ]M_{j+1}, M_j]
    maps to the k-interval ]h*(2^(2j-1) + 1/2), h*(2^(2j+1) + 1/2)]; the
    union over j is ]h, K_{h,U}] with K_{h,U} = h/2 + 2^(2J+1)*h.
    """

    U: float
    u: float
    J: int
    block_bounds: np.ndarray  # M_0 .. M_{J+1}, strictly decreasing

    def k_upper(self, h: int) -> float:
        return h / 2.0 + 2.0 ** (2 * self.J + 1) * h


def dyadic_scheme(U: float, u: Optional[float] = None) -> DyadicScheme:
    if U < 4:
        raise DomainError(f"U must be >= 4, got {U}")
    if u is None:
        u = float(U)
    if not U - 1 <= u <= U + 1:
        raise DomainError(f"u must lie in [U-1, U+1], got u={u}, U={U}")
    J = 0
    while (U - 1) * 2.0 ** (-J - 1) >= 1.0:
        J += 1
    bounds = u * 2.0 ** (-np.arange(J + 2, dtype=np.float64))
    return DyadicScheme(U=float(U), u=float(u), J=J, block_bounds=bounds)


def _phase_derivative(h: int, u: float, xi: float) -> float:
    """F'(xi) for F(xi) = -h*(u^2/(2 xi) - xi/2)."""
    return h * (u * u / (2.0 * xi * xi) + 0.5)


def _int_range(lo: float, hi: float) -> np.ndarray:
    """Integers n with lo < n <= hi."""
    a = int(math.floor(lo)) + 1
    b = int(math.floor(hi))
    while b + 1 <= hi:
        b += 1
    while b >= a and b > hi:
        b -= 1
    if b < a:
        return np.empty(0, dtype=np.int64)
    return np.arange(a, b + 1, dtype=np.int64)


def exp_sum_direct(j: int, h: int, u: float, ell: int, U: Optional[float] = None) -> complex:
    """Block sum of m*(u^2-m^2)^(ell-1) * e(-h*(u^2/(2m) - m/2)) over the
    j-th dyadic block."""
    scheme = dyadic_scheme(U if U is not None else u, u)
    if j < 0 or j > scheme.J:
        raise DomainError(f"block index {j} outside 0..{scheme.J}")
    if h < 1 or h > scheme.U:
        raise DomainError(f"h must be in [1, U], got {h}")
    m = _int_range(scheme.block_bounds[j + 1], scheme.block_bounds[j]).astype(np.float64)
    if m.size == 0:
        return 0.0 + 0.0j
    amp = m * (u * u - m * m) ** (ell - 1)
    return complex(np.sum(amp * e(-h * (u * u / (2.0 * m) - m / 2.0))))


def exp_sum_transformed(j: int, h: int, u: float, ell: int, U: Optional[float] = None) -> complex:
    """Stationary-phase main term of the j-th block sum:

    h^(3/4) u^(2 ell - 1/2) * sum_k (2k-2h)^(ell-1)/(2k-h)^(ell+1/4)
                                  * e(-u*sqrt(h)*sqrt(2k-h) - 1/8)

    with k running over the image of the block under the phase derivative.
    """
    scheme = dyadic_scheme(U if U is not None else u, u)
    if j < 0 or j > scheme.J:
        raise DomainError(f"block index {j} outside 0..{scheme.J}")
    lo = _phase_derivative(h, u, scheme.block_bounds[j])
    hi = _phase_derivative(h, u, scheme.block_bounds[j + 1])
    k = _int_range(lo, hi).astype(np.float64)
    if k.size == 0:
        return 0.0 + 0.0j
    amp = (2.0 * k - 2.0 * h) ** (ell - 1) / (2.0 * k - h) ** (ell + 0.25)
    phase = e(-u * math.sqrt(h) * np.sqrt(2.0 * k - h) - 0.125)
    return complex(h ** 0.75 * u ** (2 * ell - 0.5) * np.sum(amp * phase))


def transform_gap_bound(j: int, h: int, u: float, ell: int) -> float:
    """Shape of the transform's error term: u^(2l-3)*M_j^(5/2)/sqrt(h) + u^(2l-1)*log u."""
    m_j = u * 2.0 ** (-j)
    return u ** (2 * ell - 3) * m_j ** 2.5 / math.sqrt(h) + u ** (2 * ell - 1) * math.log(u)


# ---------------------------------------------------------------------------
# the sum S(u, U)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrigSum:
    """Precomputed terms of S(u, U) for fast evaluation on u-grids.

    S(u) = sum_i a[i]*sin(2 pi u sqrt_n[i] + pi/4) - b[i]*cos(same phase).
    """

    U: float
    ell: int
    k_cap: Optional[int]
    h: np.ndarray
    k: np.ndarray
    n: np.ndarray
    sqrt_n: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def size(self) -> int:
        return len(self.n)

    @property
    def max_frequency(self) -> float:
        return float(self.sqrt_n.max()) if self.size else 0.0

    def evaluate(self, u):
        """S(u, U) for scalar or array u."""
        phase = 2.0 * math.pi * np.multiply.outer(np.asarray(u, dtype=np.float64), self.sqrt_n)
        phase += 0.25 * math.pi
        out = np.sin(phase) @ self.a - np.cos(phase) @ self.b
        return float(out) if np.ndim(out) == 0 else out


def build_trig_sum(
    U: float,
    ell: int,
    k_cap: Optional[int] = DEFAULT_K_CAP,
    coeffs: Optional[VaalerCoeffs] = None,
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> TrigSum:
    """Materialize the (h, k) terms of S(u, U), k truncated at k_cap."""
    scheme = dyadic_scheme(U)
    H = int(math.floor(U))
    if coeffs is None:
        coeffs = vaaler_coeffs(H)
    if coeffs.H < H:
        raise DomainError(f"need Vaaler coefficients up to H = {H}, got {coeffs.H}")
    hs, ks = [], []
    total = 0
    for h in range(1, H + 1):
        k_hi_real = scheme.k_upper(h)
        k_hi = int(math.floor(k_hi_real))
        while k_hi + 1 <= k_hi_real:
            k_hi += 1
        if k_cap is not None:
            k_hi = min(k_hi, k_cap)
        count = max(k_hi - h, 0)
        total += count
        if total > max_pairs:
            raise BudgetExceeded(
                f"D(U) has more than {max_pairs} pairs for U={U}"
                + ("" if k_cap else " without truncation")
            )
        if count:
            hs.append(np.full(count, h, dtype=np.int64))
            ks.append(np.arange(h + 1, k_hi + 1, dtype=np.int64))
    if not hs:
        empty = np.empty(0)
        return TrigSum(U, ell, k_cap, empty.astype(np.int64), empty.astype(np.int64),
                       empty.astype(np.int64), empty, empty, empty)
    h_arr = np.concatenate(hs)
    k_arr = np.concatenate(ks)
    n_arr = h_arr * (2 * k_arr - h_arr)
    if int(n_arr.max()) < 2 ** 53:
        sqrt_n = np.sqrt(n_arr.astype(np.float64))
    else:  # float conversion would drop bits of n; refine from integer seeds
        sqrt_n = np.array([sqrt_of_int(int(n)) for n in n_arr])
    amp = h_arr ** 0.75 * (2.0 * (k_arr - h_arr)) ** (ell - 1) / (2.0 * k_arr - h_arr) ** (ell + 0.25)
    sign = np.where((h_arr * ell) % 2 == 0, 1.0, -1.0)
    signed = sign * amp
    a = signed * coeffs.alpha[h_arr - 1]
    b = signed * coeffs.beta[h_arr - 1]
    return TrigSum(U=float(U), ell=ell, k_cap=k_cap, h=h_arr, k=k_arr, n=n_arr,
                   sqrt_n=sqrt_n, a=a, b=b)


def trig_sum_S(
    u: float,
    U: float,
    ell: int,
    k_cap: Optional[int] = DEFAULT_K_CAP,
    coeffs: Optional[VaalerCoeffs] = None,
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> float:
    """S(u, U) at a single u in [U-1, U+1]."""
    if not U - 1 <= u <= U + 1:
        raise DomainError(f"u must lie in [U-1, U+1], got u={u}, U={U}")
    return float(build_trig_sum(U, ell, k_cap, coeffs, max_pairs).evaluate(u))


def term_rows(trig: TrigSum, u: float):
    """Per-term inspection rows (h, k, n, amplitude, phase mod 2 pi) at u."""
    phases = (2.0 * math.pi * u * trig.sqrt_n + 0.25 * math.pi) % (2.0 * math.pi)
    amps = np.hypot(trig.a, trig.b)
    for i in range(trig.size):
        yield int(trig.h[i]), int(trig.k[i]), int(trig.n[i]), float(amps[i]), float(phases[i])


# ---------------------------------------------------------------------------
# Fejer kernel and averaging
# ---------------------------------------------------------------------------


def fejer_kernel(T: float, v):
    """F_T(v) = T * (sin(pi T v)/(pi T v))^2, with F_T(0) = T."""
    if T < 1:
        raise DomainError(f"T must be >= 1, got {T}")
    out = T * np.sinc(T * np.asarray(v, dtype=np.float64)) ** 2
    return float(out) if np.ndim(out) == 0 else out


def _panel(f: Callable, lo: float, hi: float):
    half = 0.5 * (hi - lo)
    x = 0.5 * (lo + hi) + half * _GL_NODES
    return half * np.sum(np.asarray(f(x)) * _GL_WEIGHTS)


def adaptive_gauss(
    f: Callable,
    a: float,
    b: float,
    rel_tol: float = 1e-8,
    depth_limit: int = 20,
):
    """Adaptive composite 8-point Gauss-Legendre on [a, b].

    f must accept ndarray arguments; complex values are supported.  The
    acceptance scale is the integral of |f| on a fixed coarse partition, so
    heavy cancellation cannot drive endless refinement.
    """
    coarse = np.linspace(a, b, 65)
    scale = sum(abs(_panel(lambda x: np.abs(f(x)), lo, hi))
                for lo, hi in zip(coarse[:-1], coarse[1:]))
    scale = max(scale, 1e-300)

    def recurse(lo, hi, whole, depth):
        if depth > depth_limit:
            raise QuadratureFailure(
                f"no convergence at depth {depth_limit} on [{lo}, {hi}]"
            )
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        if abs(left + right - whole) <= rel_tol * scale:
            return left + right
        return recurse(lo, mid, left, depth + 1) + recurse(mid, hi, right, depth + 1)

    return recurse(a, b, _panel(f, a, b), 0)


@dataclass(frozen=True)
class FejerIdentity:
    """Numeric vs closed-form value of the Fejer-averaged exponential."""

    numeric: complex
    closed: complex
    gap: float


def fejer_identity_check(T: float, Q: float, delta: float) -> FejerIdentity:
    """Compare the integral of F_T(v) e(Qv + delta) over [-1,1] with the
    triangle-weight closed form max(1 - Q/T, 0) e(delta)."""
    if Q <= 0:
        raise DomainError(f"Q must be positive, got {Q}")
    numeric = adaptive_gauss(lambda v: fejer_kernel(T, v) * e(Q * v + delta), -1.0, 1.0)
    closed = max(1.0 - Q / T, 0.0) * complex(e(delta))
    return FejerIdentity(numeric=complex(numeric), closed=closed, gap=abs(numeric - closed))


@dataclass(frozen=True)
class FejerAverage:
    """I(T, U): quadrature value, frequency-space prediction, and the size
    of the neglected tail."""

    T: float
    U: float
    numeric: float
    prediction: float
    o_term_bound: float

    @property
    def gap(self) -> float:
        return abs(self.numeric - self.prediction)


def fejer_average_I(
    T: float,
    U: float,
    ell: int,
    k_cap: Optional[int] = DEFAULT_K_CAP,
    coeffs: Optional[VaalerCoeffs] = None,
    rel_tol: float = 1e-8,
) -> FejerAverage:
    """Average S(U+v, U) against the Fejer kernel and compare with the
    truncated frequency sum of the averaged identity."""
    if U < T * T:
        raise DomainError(f"need U >= T^2, got U={U}, T={T}")
    trig = build_trig_sum(U, ell, k_cap, coeffs)
    numeric = adaptive_gauss(
        lambda v: trig.evaluate(U + v) * fejer_kernel(T, v), -1.0, 1.0, rel_tol=rel_tol
    )
    keep = trig.n <= T * T
    weight = 1.0 - trig.sqrt_n[keep] / T
    phase = 2.0 * math.pi * U * trig.sqrt_n[keep] + 0.25 * math.pi
    prediction = float(np.sum(weight * (trig.a[keep] * np.sin(phase) - trig.b[keep] * np.cos(phase))))
    o_bound = float(
        np.sum(
            trig.h ** -0.75
            * (2.0 * (trig.k - trig.h)) ** (ell - 1)
            / (2.0 * trig.k - trig.h) ** (ell + 0.75)
        )
    )
    return FejerAverage(T=T, U=U, numeric=float(np.real(numeric)),
                        prediction=prediction, o_term_bound=o_bound)
