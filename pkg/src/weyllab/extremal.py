"""End-to-end extremal-value pipeline: pick T, find the Kronecker integer U,
scan S(u, U) for its peak u*, Fejer-average to I(T, U), and confirm a large
positive remainder at t* = 2*pi*u*^2.

Odd ell only: the pipeline's sign argument needs (-1)^(h*ell) * (-1)^h = 1
so that the aligned sine values add up instead of cancelling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytic import DEFAULT_K_CAP, build_trig_sum, fejer_average_I, theta_table
from .counting import count_spectrum
from .diophantine import KroneckerTarget, kronecker_search
from .errors import DomainError, DomainTooSmall, EvenEllUnsupported, SearchFailed
from .manifold import TWO_PI, ManifoldParams

#: exact R(t*) needs ~t*^ell class-I lattice work; beyond this the report
#: carries S and I only
EXACT_R_CEILING_BASE = 1.0e8


def omega_normalizer(ell: int, t: float) -> float:
    """Normalizing factor of the extremal statement: (log t)^(1/4) for even
    ell, (log log t * log log log t)^(1/4) for odd ell."""
    if ell % 2 == 0:
        if t <= 1.0:
            raise DomainTooSmall(f"even ell needs t > 1, got {t}")
        return math.log(t) ** 0.25
    if t <= math.exp(math.e):
        raise DomainTooSmall(f"odd ell needs t > e^e, got {t}")
    log2 = math.log(math.log(t))
    log3 = math.log(log2)
    return (log2 * log3) ** 0.25


def theta_lower_sum(ell: int, T: float, threads: int = 1) -> float:
    """Sum of theta_ell(n)/n^(3/4) over n <= T^2/2 (grows like sqrt(T))."""
    if T < 2:
        raise DomainError(f"T must be >= 2, got {T}")
    limit = int(math.floor(T * T / 2.0))
    while limit + 1 <= T * T / 2.0:
        limit += 1
    if limit < 1:
        return 0.0
    table = theta_table(ell, limit, threads=threads)
    n = np.arange(1, limit + 1, dtype=np.float64)
    return float(np.sum(table.values[1:] / n ** 0.75))


@dataclass(frozen=True)
class ExtremalReport:
    """Everything the exceptional-value search produced."""

    T: float
    U: int
    u_star: float
    S_at_u_star: float
    I_value: float
    t_star: float
    R_at_t_star: Optional[float]
    normalized_R: Optional[float]
    omega_value: float
    theta_sum_lower: float
    r_exact: str  # "exact" or "unavailable"
    u_grid: np.ndarray
    s_trace: np.ndarray


def exact_r_ceiling(ell: int) -> float:
    return EXACT_R_CEILING_BASE ** (1.0 / ell)


def run_pipeline(
    params: ManifoldParams,
    T: float,
    epsilon0: float,
    search_budget: int,
    grid: int = 2001,
    k_cap: Optional[int] = DEFAULT_K_CAP,
    threads: int = 1,
) -> ExtremalReport:
    """Full extremal search at threshold T.

    Stages: squarefree targets in (1, T^2]; smallest U >= T^2 passing the
    box condition within the budget; S(u, U) on a grid over [U-1, U+1];
    Fejer average I(T, U); exact remainder at t* when within the counting
    ceiling.
    """
    if params.ell % 2 == 0:
        raise EvenEllUnsupported(
            f"pipeline requires odd ell, got {params.ell}"
        )
    if T < 2:
        raise DomainError(f"T must be >= 2, got {T}")
    if not 0.0 < epsilon0 < 0.5:
        raise DomainError(f"epsilon0 must be in (0, 1/2), got {epsilon0}")
    if grid < 40 * T:
        raise DomainError(f"grid must be >= 40*T = {40 * T}, got {grid}")

    target = KroneckerTarget.for_threshold(T, epsilon0)
    # the Fejer step needs U >= T^2, so the scan starts there
    u_min = int(math.ceil(T * T))
    while u_min < T * T:
        u_min += 1
    if u_min > search_budget:
        raise SearchFailed(f"budget {search_budget} below U_min = {u_min}")
    U = kronecker_search(target, u_min, search_budget, threads=threads)
    if U is None:
        raise SearchFailed(
            f"no U in [{u_min}, {search_budget}] meets the box condition"
        )
    assert U >= T * T

    trig = build_trig_sum(U, params.ell, k_cap)
    u_grid = np.linspace(U - 1.0, U + 1.0, grid)
    s_trace = trig.evaluate(u_grid)
    peak = int(np.argmax(s_trace))
    u_star = float(u_grid[peak])
    s_star = float(s_trace[peak])

    i_value = fejer_average_I(T, U, params.ell, k_cap).numeric

    t_star = TWO_PI * u_star * u_star
    if t_star <= exact_r_ceiling(params.ell):
        res = count_spectrum(params, t_star, threads=threads)
        r_star: Optional[float] = res.remainder
        normalized: Optional[float] = res.normalized
        r_exact = "exact"
    else:
        r_star = None
        normalized = None
        r_exact = "unavailable"

    return ExtremalReport(
        T=T,
        U=int(U),
        u_star=u_star,
        S_at_u_star=s_star,
        I_value=i_value,
        t_star=t_star,
        R_at_t_star=r_star,
        normalized_R=normalized,
        omega_value=omega_normalizer(params.ell, t_star),
        theta_sum_lower=theta_lower_sum(params.ell, T),
        r_exact=r_exact,
        u_grid=u_grid,
        s_trace=s_trace,
    )
