import math

import numpy as np
import pytest

from weyllab import analytic, extremal, manifold
from weyllab.errors import DomainError, DomainTooSmall, EvenEllUnsupported, SearchFailed

P1 = manifold.validate_params(1, [1])


def test_omega_examples():
    assert extremal.omega_normalizer(2, math.exp(4.0)) == pytest.approx(math.sqrt(2), rel=1e-12)
    # log2 t = e, log3 t = 1 forces t = exp(exp(e))
    t = math.exp(math.exp(math.e))
    assert extremal.omega_normalizer(1, t) == pytest.approx(math.e ** 0.25, rel=1e-9)
    # frozen 40-digit evaluation at t = 1e10
    assert extremal.omega_normalizer(1, 1.0e10) == pytest.approx(1.376070619, abs=1e-8)
    with pytest.raises(DomainTooSmall):
        extremal.omega_normalizer(1, 10.0)
    with pytest.raises(DomainTooSmall):
        extremal.omega_normalizer(2, 1.0)


def test_theta_lower_sum_values():
    assert extremal.theta_lower_sum(1, 2.0) == 0.0
    prev = 0.0
    for T in (4.0, 8.0, 16.0, 32.0, 64.0):
        cur = extremal.theta_lower_sum(1, T)
        assert cur >= prev
        prev = cur
    for T in (8.0, 16.0, 32.0):
        assert extremal.theta_lower_sum(1, 2 * T) / extremal.theta_lower_sum(1, T) >= 1.2
    with pytest.raises(DomainError):
        extremal.theta_lower_sum(1, 1.0)


def test_theta_lower_sum_matches_coeff_sum():
    T = 10.0
    want = sum(analytic.theta_coeff(1, n) / n ** 0.75 for n in range(1, 51))
    assert extremal.theta_lower_sum(1, T) == pytest.approx(want, rel=1e-12)


def test_pipeline_preconditions():
    with pytest.raises(EvenEllUnsupported):
        extremal.run_pipeline(manifold.validate_params(2, [1, 1]), 2.0, 0.25, 10 ** 6)
    with pytest.raises(DomainError):
        extremal.run_pipeline(P1, 1.5, 0.25, 10 ** 6)
    with pytest.raises(DomainError):
        extremal.run_pipeline(P1, 2.0, 0.7, 10 ** 6)
    with pytest.raises(DomainError):
        extremal.run_pipeline(P1, 2.0, 0.25, 10 ** 6, grid=50)
    with pytest.raises(SearchFailed):
        extremal.run_pipeline(P1, 2.0, 0.25, 3)


def test_pipeline_smoke():
    rep = extremal.run_pipeline(P1, 2.0, 0.25, 10 ** 6, grid=401)
    assert rep.U == 6
    assert rep.U >= rep.T ** 2
    assert rep.U - 1 <= rep.u_star <= rep.U + 1
    assert rep.t_star == pytest.approx(2 * math.pi * rep.u_star ** 2, rel=1e-15)
    assert rep.S_at_u_star > 0
    assert rep.r_exact == "exact"
    assert rep.R_at_t_star is not None and rep.R_at_t_star > 0
    assert rep.normalized_R == pytest.approx(
        rep.R_at_t_star / rep.t_star ** 0.75, rel=1e-12
    )
    assert rep.omega_value > 0
    # the averaged value cannot exceed the grid supremum of S
    assert rep.I_value <= float(np.max(rep.s_trace)) + 1e-9
    assert rep.S_at_u_star == float(np.max(rep.s_trace))


def test_pipeline_argmax_stability():
    rep1 = extremal.run_pipeline(P1, 2.0, 0.25, 10 ** 6, grid=2001)
    rep2 = extremal.run_pipeline(P1, 2.0, 0.25, 10 ** 6, grid=4001)
    assert abs(rep2.S_at_u_star - rep1.S_at_u_star) < 0.01 * abs(rep1.S_at_u_star)


def test_pipeline_exact_counting_ceiling(monkeypatch):
    monkeypatch.setattr(extremal, "EXACT_R_CEILING_BASE", 10.0)
    rep = extremal.run_pipeline(P1, 2.0, 0.25, 10 ** 6, grid=401)
    assert rep.r_exact == "unavailable"
    assert rep.R_at_t_star is None and rep.normalized_R is None
    assert rep.S_at_u_star > 0  # S and I still reported


def test_exact_r_ceiling_scaling():
    assert extremal.exact_r_ceiling(1) == pytest.approx(1.0e8)
    assert extremal.exact_r_ceiling(3) == pytest.approx(10 ** (8 / 3), rel=1e-12)
