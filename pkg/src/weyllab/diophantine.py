"""Simultaneous Diophantine approximation: squarefree sieving, the box
condition search for U with all U*sqrt(q) close to 1/2 mod 1, discrepancy
of point sets mod 1, and the numeric linear-independence certificate.

The scan works on doubles (chunked, resynchronized from a two-term integer
representation of sqrt(q) every 2^20 steps, so drift stays near 1e-10) and
every candidate that survives the float filter is re-verified with exact
integer arithmetic.  The reported U is therefore exact, not
rounding-dependent.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, DomainError, PrecisionCeilingExceeded

_CHUNK = 1 << 20

#: worst-case float error of a chunk scan (base resync 1e-16 plus 2^20
#: accumulation steps at one ulp each), padded by an order of magnitude
_DRIFT_GUARD = 1e-9

_SQRT_BITS = 120


def squarefree_up_to(Q: int) -> np.ndarray:
    """All squarefree integers in (1, Q], ascending (note: 1 is excluded)."""
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    free = np.ones(Q + 1, dtype=bool)
    free[:2] = False
    for p in range(2, math.isqrt(Q) + 1):
        # skipping already-marked p is safe: its square multiples are covered
        # by the smaller prime square dividing p^2
        if free[p]:
            free[p * p:: p * p] = False
    return np.flatnonzero(free).astype(np.int64)


def dist_nearest_int(x):
    """Distance from x to the nearest integer, in [0, 1/2]."""
    x = np.asarray(x, dtype=np.float64)
    out = np.abs(x - np.round(x))
    return float(out) if out.ndim == 0 else out


class _SqrtRep:
    """sqrt(q) as integer floor(sqrt(q) * 2^120) plus derived float pieces."""

    __slots__ = ("q", "scaled", "frac")

    def __init__(self, q: int):
        self.q = q
        self.scaled = math.isqrt(q << (2 * _SQRT_BITS))
        self.frac = (self.scaled % (1 << _SQRT_BITS)) / float(1 << _SQRT_BITS)

    def frac_at(self, U: int) -> float:
        """Fractional part of U*sqrt(q), accurate to ~1e-16."""
        return ((U * self.scaled) % (1 << _SQRT_BITS)) / float(1 << _SQRT_BITS)


def _box_holds_exact(U: int, q: int, eps: Fraction) -> bool:
    """Exact test of dist(U*sqrt(q) - 1/2) <= eps via integer comparisons."""
    target = 4 * U * U * q
    a = math.isqrt(U * U * q)
    num, den = eps.numerator, eps.denominator
    for n in (a - 1, a, a + 1):
        lo = (2 * n + 1) * den - 2 * num
        hi = (2 * n + 1) * den + 2 * num
        if lo < 0:
            lo = 0
        if lo * lo <= target * den * den <= hi * hi:
            return True
    return False


@dataclass(frozen=True)
class KroneckerTarget:
    """Box condition data: find U with dist(U*sqrt(q) - 1/2) <= epsilon0/T
    simultaneously for every squarefree q in (1, T^2]."""

    T: float
    epsilon0: float = 0.1
    qs: tuple[int, ...] = field(default_factory=tuple)
    found_U: Optional[int] = None

    def __post_init__(self):
        if self.T < 2:
            raise DomainError(f"T must be >= 2, got {self.T}")
        if self.epsilon0 <= 0:
            raise DomainError(f"epsilon0 must be positive, got {self.epsilon0}")
        if list(self.qs) != sorted(set(self.qs)):
            raise DomainError("qs must be strictly ascending")
        if self.qs:
            if self.qs[0] <= 1 or self.qs[-1] > self.T * self.T:
                raise DomainError("qs must lie in (1, T^2]")
            free = set(int(v) for v in squarefree_up_to(int(self.qs[-1])))
            bad = [q for q in self.qs if q not in free]
            if bad:
                raise DomainError(f"not squarefree: {bad}")
        if self.found_U is not None and not self.verify(self.found_U):
            raise DomainError(f"found_U = {self.found_U} fails the box condition")

    @classmethod
    def for_threshold(cls, T: float, epsilon0: float = 0.1) -> "KroneckerTarget":
        """Target with qs = all squarefree integers in (1, T^2]."""
        q_hi = int(math.floor(T * T))
        while q_hi + 1 <= T * T:
            q_hi += 1
        qs = tuple(int(q) for q in squarefree_up_to(max(q_hi, 1)))
        return cls(T=T, epsilon0=epsilon0, qs=qs)

    @property
    def s(self) -> int:
        return len(self.qs)

    @property
    def box_halfwidth(self) -> float:
        return self.epsilon0 / self.T

    def _eps_fraction(self) -> Fraction:
        return Fraction(self.epsilon0) / Fraction(self.T)

    def distances(self, U: int) -> np.ndarray:
        """High-accuracy dist(U*sqrt(q) - 1/2) for each q."""
        return np.array([abs(_SqrtRep(q).frac_at(U) - 0.5) for q in self.qs])

    def verify(self, U: int) -> bool:
        """Exact-integer re-verification of the box condition at U."""
        eps = self._eps_fraction()
        return all(_box_holds_exact(U, q, eps) for q in self.qs)


def _scan_chunk(target: KroneckerTarget, reps, lo: int, hi: int) -> Optional[int]:
    """Smallest qualifying U in [lo, hi), or None; exactness via re-check."""
    eps = target.box_halfwidth
    k = np.arange(hi - lo, dtype=np.float64)
    good = np.ones(hi - lo, dtype=bool)
    for rep in reps:
        phi = (rep.frac_at(lo) + k * rep.frac) % 1.0
        good &= np.abs(phi - 0.5) <= eps + _DRIFT_GUARD
        if not good.any():
            return None
    eps_frac = target._eps_fraction()
    for idx in np.flatnonzero(good):
        U = lo + int(idx)
        if all(_box_holds_exact(U, q, eps_frac) for q in target.qs):
            return U
    return None


def kronecker_search(
    target: KroneckerTarget,
    U_min: int,
    U_max: int,
    threads: int = 1,
) -> Optional[int]:
    """Smallest integer U in [U_min, U_max] satisfying the box condition.

    Scans ascending in fixed 2^20-length chunks (so results do not depend on
    the thread count), filtering with doubles and confirming candidates with
    exact integer arithmetic.
    """
    if U_min < 1 or U_min > U_max:
        raise DomainError(f"need 1 <= U_min <= U_max, got [{U_min}, {U_max}]")
    if not target.qs or target.box_halfwidth >= 0.5:
        return U_min
    if _DRIFT_GUARD > target.epsilon0 / (10.0 * target.T):
        raise PrecisionCeilingExceeded(
            f"box halfwidth {target.box_halfwidth} too small for the float scan"
        )
    reps = [_SqrtRep(q) for q in target.qs]
    spans = [(lo, min(lo + _CHUNK, U_max + 1)) for lo in range(U_min, U_max + 1, _CHUNK)]
    if threads <= 1:
        for lo, hi in spans:
            hit = _scan_chunk(target, reps, lo, hi)
            if hit is not None:
                return hit
        return None
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for batch_start in range(0, len(spans), threads):
            batch = spans[batch_start: batch_start + threads]
            results = list(pool.map(lambda ab: _scan_chunk(target, reps, *ab), batch))
            for hit in results:
                if hit is not None:
                    return hit
    return None


# ---------------------------------------------------------------------------
# discrepancy mod 1
# ---------------------------------------------------------------------------


class Discrepancy(NamedTuple):
    value: float
    exact: bool


def _disc_1d(x: np.ndarray) -> float:
    """Exact extreme discrepancy of 1-d points, both boundary conventions."""
    x = np.sort(x)
    n = len(x)
    idx = np.arange(1, n + 1)
    # closed intervals [x_i, x_j]: (j-i+1)/n - (x_j - x_i)
    a = idx / n - x
    b = x - (idx - 1) / n
    d_plus = np.max(a + np.maximum.accumulate(b))
    # open intervals, domain edges included via sentinels
    e_aug = np.concatenate([[0.0], x - idx / n, [1.0 - (n + 1) / n]])
    d_minus = np.max(e_aug - np.minimum.accumulate(e_aug)) + 1.0 / n
    return float(max(d_plus, d_minus))


def _disc_2d(pts: np.ndarray) -> float:
    """Exact extreme discrepancy in 2-d by sweeping critical x-windows."""
    n = len(pts)
    xs = np.unique(pts[:, 0])
    best = 0.0
    # closed boxes: x-window [xa, xb], y handled by the 1-d closed scan
    for ia in range(len(xs)):
        for ib in range(ia, len(xs)):
            xa, xb = xs[ia], xs[ib]
            sel = pts[(pts[:, 0] >= xa) & (pts[:, 0] <= xb)]
            if len(sel) == 0:
                continue
            width = xb - xa
            y = np.sort(sel[:, 1])
            idx = np.arange(1, len(y) + 1)
            a = idx / n - width * y
            b = width * y - (idx - 1) / n
            best = max(best, float(np.max(a + np.maximum.accumulate(b))))
    # open boxes: x-window (xa, xb) with virtual edges below 0 / above 1
    x_lo = np.concatenate([[-1.0], xs])
    x_hi = np.concatenate([xs, [2.0]])
    for xa in x_lo:
        for xb in x_hi:
            width = min(float(xb), 1.0) - max(float(xa), 0.0)
            if width <= 0:
                continue
            sel = pts[(pts[:, 0] > xa) & (pts[:, 0] < xb)]
            y = np.sort(sel[:, 1])
            m = len(y)
            e_aug = np.concatenate([[0.0], width * y - np.arange(1, m + 1) / n,
                                    [width - (m + 1) / n]])
            best = max(best, float(np.max(e_aug - np.minimum.accumulate(e_aug)) + 1.0 / n))
    return best


def _disc_estimate(pts: np.ndarray, samples: int = 100_000, seed: int = 0) -> float:
    """Lower-bound estimate by random axis-aligned boxes."""
    n, s = pts.shape
    rng = np.random.default_rng(seed)
    best = 0.0
    chunk = max(1, min(samples, 10_000_000 // max(n, 1)))
    done = 0
    while done < samples:
        take = min(chunk, samples - done)
        corners = rng.random((take, 2, s))
        lo = np.minimum(corners[:, 0, :], corners[:, 1, :])
        hi = np.maximum(corners[:, 0, :], corners[:, 1, :])
        vol = np.prod(hi - lo, axis=1)
        inside_open = np.ones((take, n), dtype=bool)
        inside_closed = np.ones((take, n), dtype=bool)
        for d in range(s):
            inside_open &= (pts[None, :, d] > lo[:, None, d]) & (pts[None, :, d] < hi[:, None, d])
            inside_closed &= (pts[None, :, d] >= lo[:, None, d]) & (pts[None, :, d] <= hi[:, None, d])
        frac_open = inside_open.sum(axis=1) / n
        frac_closed = inside_closed.sum(axis=1) / n
        best = max(best, float(np.max(vol - frac_open)), float(np.max(frac_closed - vol)))
        done += take
    return best


def discrepancy_mod1(points) -> Discrepancy:
    """Discrepancy mod 1 of a point set: exact for dimension s <= 2, a
    seeded random-box lower-bound estimate (flagged) for s > 2."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.size == 0:
        raise DomainError("need at least one point")
    pts = np.mod(pts, 1.0)
    s = pts.shape[1]
    if s == 1:
        return Discrepancy(_disc_1d(pts[:, 0]), True)
    if s == 2:
        return Discrepancy(_disc_2d(pts), True)
    return Discrepancy(_disc_estimate(pts), False)


# ---------------------------------------------------------------------------
# Besicovitch independence certificate
# ---------------------------------------------------------------------------


class BesicovitchCertificate(NamedTuple):
    min_dist: float
    witness: tuple[int, ...]


def besicovitch_check(qs: Sequence[int], H_max: int) -> BesicovitchCertificate:
    """Minimum of dist_nearest_int(sum h_i sqrt(q_i)) over nonzero integer
    vectors with |h|_inf <= H_max, with the achieving vector.

    Linear independence of the sqrt(q_i) over Z predicts a strictly positive
    minimum; this is the desk-scale certificate of that fact.
    """
    qs = tuple(int(q) for q in qs)
    if not qs or H_max < 1:
        raise DomainError("need nonempty qs and H_max >= 1")
    if len(qs) * math.log2(2 * H_max + 1) > 40:
        raise BudgetExceeded(
            f"enumeration of {2 * H_max + 1}^{len(qs)} vectors exceeds the budget"
        )
    roots = [math.sqrt(q) for q in qs]
    best = None
    witness = None
    for h in itertools.product(range(-H_max, H_max + 1), repeat=len(qs)):
        if all(v == 0 for v in h):
            continue
        # mirror vectors give the same distance; keep first-nonzero > 0
        first = next(v for v in h if v != 0)
        if first < 0:
            continue
        x = math.fsum(v * r for v, r in zip(h, roots))
        d = abs(x - round(x))
        if best is None or d < best:
            best, witness = d, h
    return BesicovitchCertificate(min_dist=float(best), witness=tuple(witness))
