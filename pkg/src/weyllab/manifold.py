"""Rational Heisenberg manifold parameters and exact spectrum enumeration.

The Laplace-Beltrami spectrum of the (2*ell+1)-dimensional manifold splits
into two classes: a torus-like part (class I, eigenvalues 4*pi^2*k with
sum-of-2*ell-squares multiplicities) and the genuinely Heisenberg part
(class II, eigenvalues 2*pi*(n0^2 + n0*(2*n1 + ell))).

Boundary convention: the cutoff "eigenvalue <= t" is decided by comparing
the exact integer index quantity against t/(2*pi) (resp. t/(4*pi^2)); the
int-vs-float comparison in Python is exact, so jump points are handled
deterministically (closed boundary).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityExceeded, DivisibilityViolation, DomainError, LengthMismatch

TWO_PI = 2.0 * math.pi
FOUR_PI_SQ = 4.0 * math.pi ** 2

#: default cap on representation-count table length (entries, not bytes)
MEMORY_BUDGET_ENTRIES = 1 << 28

CLASS_I = "I"
CLASS_II = "II"


@dataclass(frozen=True)
class ManifoldParams:
    """Manifold data: dimension parameter ell and the subgroup tuple r.

    The entries of r must satisfy the divisibility chain r_j | r_{j+1};
    r_product is cached because it enters every multiplicity and the Weyl
    coefficient.
    """

    ell: int
    r: tuple[int, ...]
    r_product: int

    def __post_init__(self):
        if self.ell < 1:
            raise LengthMismatch(f"ell must be >= 1, got {self.ell}")
        if len(self.r) != self.ell:
            raise LengthMismatch(f"r has length {len(self.r)}, expected ell = {self.ell}")
        prod = 1
        for j, rj in enumerate(self.r):
            if rj < 1:
                raise DivisibilityViolation(f"r[{j}] = {rj} must be a positive integer")
            prod *= rj
        for j in range(self.ell - 1):
            if self.r[j + 1] % self.r[j] != 0:
                raise DivisibilityViolation(
                    f"r[{j}] = {self.r[j]} does not divide r[{j + 1}] = {self.r[j + 1]}"
                )
        if prod != self.r_product:
            raise DivisibilityViolation(
                f"r_product = {self.r_product} but prod(r) = {prod}"
            )


def validate_params(ell: int, r) -> ManifoldParams:
    """Validate (ell, r) and return ManifoldParams with cached r_product."""
    r = tuple(int(v) for v in r)
    prod = 1
    for v in r:
        prod *= v
    return ManifoldParams(ell=int(ell), r=r, r_product=prod)


@dataclass(frozen=True)
class SpectralLine:
    """One eigenvalue with multiplicity and its generating indices.

    Class II lines carry indices (n0, n1); class I lines carry the integer
    squared norm k (in dual-lattice mode the scaled norm, see
    enumerate_class1).
    """

    eigenvalue: float
    multiplicity: int
    class_tag: str
    indices: tuple[int, int] | int


@dataclass(frozen=True)
class RepCounts:
    """Table k -> number of vectors in Z^dim with squared norm k, 0 <= k <= limit."""

    dim: int
    limit: int
    counts: np.ndarray  # int64, read-only


# ---------------------------------------------------------------------------
# representation counts by iterated convolution
# ---------------------------------------------------------------------------

_rep_cache: dict[int, np.ndarray] = {}
_rep_lock = threading.Lock()


def _conv_table(dim: int, K: int) -> np.ndarray:
    """Convolve the 1-d squared-norm count sequence dim times, truncated at K."""
    cur = np.zeros(K + 1, dtype=np.int64)
    cur[0] = 1
    for s in range(1, math.isqrt(K) + 1):
        cur[s * s] = 2
    for _ in range(dim - 1):
        nxt = cur.copy()  # s = 0 term
        for s in range(1, math.isqrt(K) + 1):
            nxt[s * s:] += 2 * cur[: K + 1 - s * s]
        cur = nxt
    cur.setflags(write=False)
    return cur


def rep_counts(two_ell: int, K: int, budget: Optional[int] = None) -> RepCounts:
    """Representation counts r_{2l}(k) for 0 <= k <= K by integer convolution.

    Raises CapacityExceeded if the table would exceed the memory budget
    (default MEMORY_BUDGET_ENTRIES entries).
    """
    if two_ell < 2 or two_ell % 2:
        raise DomainError(f"dimension must be a positive even integer, got {two_ell}")
    if K < 0:
        raise DomainError(f"table limit must be >= 0, got {K}")
    limit = MEMORY_BUDGET_ENTRIES if budget is None else budget
    if K + 1 > limit:
        raise CapacityExceeded(f"rep table of {K + 1} entries exceeds budget {limit}")
    with _rep_lock:
        cached = _rep_cache.get(two_ell)
        if cached is None or len(cached) < K + 1:
            grow = max(K, 2 * (len(cached) - 1)) if cached is not None else K
            grow = min(grow, limit - 1)
            cached = _conv_table(two_ell, grow)
            _rep_cache[two_ell] = cached
    counts = cached[: K + 1]
    return RepCounts(dim=two_ell, limit=K, counts=counts)


def class2_multiplicity(params: ManifoldParams, n0: int, n1: int) -> int:
    return 2 * n0 ** params.ell * params.r_product * math.comb(n1 + params.ell - 1, params.ell - 1)


def _n1_max(n0: int, ell: int, x: float) -> int:
    """Largest n1 >= 0 with n0^2 + n0*(2*n1 + ell) <= x, or -1 if none."""
    est = int((x / n0 - n0 - ell) // 2) if x / n0 - n0 - ell >= 0 else -1
    n1 = max(est, -1)
    while n0 * n0 + n0 * (2 * (n1 + 1) + ell) <= x:
        n1 += 1
    while n1 >= 0 and n0 * n0 + n0 * (2 * n1 + ell) > x:
        n1 -= 1
    return n1


def enumerate_class2(params: ManifoldParams, t_max: float) -> list[SpectralLine]:
    """All class-II lines with eigenvalue <= t_max, ascending by eigenvalue.

    Lines with equal eigenvalue but distinct (n0, n1) are kept separate;
    ties are ordered by indices.
    """
    if t_max <= 0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    x = t_max / TWO_PI
    ell = params.ell
    lines = []
    n0 = 1
    while n0 * n0 + n0 * ell <= x:
        for n1 in range(_n1_max(n0, ell, x) + 1):
            m = n0 * n0 + n0 * (2 * n1 + ell)
            lines.append(
                SpectralLine(
                    eigenvalue=TWO_PI * m,
                    multiplicity=class2_multiplicity(params, n0, n1),
                    class_tag=CLASS_II,
                    indices=(n0, n1),
                )
            )
        n0 += 1
    lines.sort(key=lambda ln: (ln.eigenvalue, ln.indices))
    return lines


def _k_max(x: float) -> int:
    """Largest integer k with k <= x (exact int-vs-float comparison)."""
    k = int(math.floor(x))
    while k + 1 <= x:
        k += 1
    while k >= 0 and k > x:
        k -= 1
    return k


def _dual_table(params: ManifoldParams, V: int, budget: Optional[int]) -> np.ndarray:
    """Multiplicity table for the dual lattice of r*Z^ell x Z^ell.

    Scaled so entries are integers: v = sum m_j^2*(L/r_j)^2 + L^2*sum n_j^2
    with L = r_ell (the lcm of the chain); eigenvalue = 4*pi^2*v/L^2.
    """
    limit = MEMORY_BUDGET_ENTRIES if budget is None else budget
    if V + 1 > limit:
        raise CapacityExceeded(f"dual table of {V + 1} entries exceeds budget {limit}")
    L = params.r[-1]
    weights = [(L // rj) ** 2 for rj in params.r] + [L * L] * params.ell
    cur = np.zeros(V + 1, dtype=np.int64)
    cur[0] = 1
    for w in weights:
        nxt = cur.copy()
        m = 1
        while w * m * m <= V:
            off = w * m * m
            nxt[off:] += 2 * cur[: V + 1 - off]
            m += 1
        cur = nxt
    return cur


def enumerate_class1(
    params: ManifoldParams,
    t_max: float,
    torus_lattice: str = "standard",
    budget: Optional[int] = None,
) -> list[SpectralLine]:
    """Class-I (torus) lines with eigenvalue <= t_max, ascending.

    The default follows the stated r-independent torus R^{2l}/Z^{2l}.  With
    torus_lattice="dual" the spectrum of the dual lattice of r*Z^l x Z^l is
    enumerated instead (exploration mode); indices then hold the scaled
    squared norm v with eigenvalue 4*pi^2*v/r_l^2.
    """
    if t_max <= 0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    if torus_lattice == "standard":
        k_hi = _k_max(t_max / FOUR_PI_SQ)
        table = rep_counts(2 * params.ell, max(k_hi, 0), budget=budget).counts
        return [
            SpectralLine(FOUR_PI_SQ * k, int(table[k]), CLASS_I, k)
            for k in range(k_hi + 1)
            if table[k] > 0
        ]
    if torus_lattice == "dual":
        L = params.r[-1]
        v_hi = _k_max(t_max * L * L / FOUR_PI_SQ)
        table = _dual_table(params, max(v_hi, 0), budget)
        return [
            SpectralLine(FOUR_PI_SQ * v / (L * L), int(table[v]), CLASS_I, v)
            for v in range(v_hi + 1)
            if table[v] > 0
        ]
    raise DomainError(f"torus_lattice must be 'standard' or 'dual', got {torus_lattice!r}")
