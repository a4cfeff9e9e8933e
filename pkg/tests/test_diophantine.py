import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weyllab import diophantine
from weyllab.errors import BudgetExceeded, DomainError, PrecisionCeilingExceeded


# ---------------------------------------------------------------------------
# squarefree sieve
# ---------------------------------------------------------------------------


def is_squarefree_trial(n):
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def test_squarefree_examples():
    assert diophantine.squarefree_up_to(4).tolist() == [2, 3]
    assert diophantine.squarefree_up_to(9).tolist() == [2, 3, 5, 6, 7]
    assert len(diophantine.squarefree_up_to(30)) == 18


def test_squarefree_against_trial_division():
    got = set(diophantine.squarefree_up_to(10 ** 4).tolist())
    want = {n for n in range(2, 10 ** 4 + 1) if is_squarefree_trial(n)}
    assert got == want


# ---------------------------------------------------------------------------
# distance to nearest integer
# ---------------------------------------------------------------------------


def test_dist_examples():
    assert diophantine.dist_nearest_int(0.5) == 0.5
    assert diophantine.dist_nearest_int(3.25) == 0.25
    assert diophantine.dist_nearest_int(-0.1) == pytest.approx(0.1, rel=1e-15)


@given(st.floats(min_value=-1e9, max_value=1e9))
@settings(deadline=None)
def test_dist_range(x):
    d = diophantine.dist_nearest_int(x)
    assert 0.0 <= d <= 0.5


# ---------------------------------------------------------------------------
# Kronecker search
# ---------------------------------------------------------------------------


def test_target_construction():
    tg = diophantine.KroneckerTarget.for_threshold(2.0, 0.25)
    assert tg.qs == (2, 3) and tg.s == 2
    with pytest.raises(DomainError):
        diophantine.KroneckerTarget(T=2.0, epsilon0=0.25, qs=(4,))
    with pytest.raises(DomainError):
        diophantine.KroneckerTarget(T=2.0, epsilon0=0.25, qs=(2, 3), found_U=5)
    # found_U = 6 really satisfies the box condition
    diophantine.KroneckerTarget(T=2.0, epsilon0=0.25, qs=(2, 3), found_U=6)


def test_kronecker_search_smallest():
    tg = diophantine.KroneckerTarget.for_threshold(2.0, 0.25)
    assert diophantine.kronecker_search(tg, 1, 10 ** 6) == 6
    assert diophantine.kronecker_search(tg, 7, 10 ** 6) > 6
    assert tg.verify(6)
    assert np.all(tg.distances(6) <= 0.25 / 2.0)


def test_kronecker_vacuous_cases():
    wide = diophantine.KroneckerTarget(T=2.0, epsilon0=1.0, qs=(2, 3))
    assert diophantine.kronecker_search(wide, 5, 100) == 5
    empty = diophantine.KroneckerTarget(T=2.0, epsilon0=0.25, qs=())
    assert diophantine.kronecker_search(empty, 3, 100) == 3
    with pytest.raises(DomainError):
        diophantine.kronecker_search(wide, 0, 10)


def test_kronecker_precision_ceiling():
    tight = diophantine.KroneckerTarget(T=2.0, epsilon0=1e-9, qs=(2, 3))
    with pytest.raises(PrecisionCeilingExceeded):
        diophantine.kronecker_search(tight, 1, 100)


def test_kronecker_threads_agree(monkeypatch):
    # shrink the chunk so multi-chunk batching actually runs
    monkeypatch.setattr(diophantine, "_CHUNK", 64)
    tg = diophantine.KroneckerTarget.for_threshold(3.0, 0.35)
    one = diophantine.kronecker_search(tg, 1, 10 ** 6, threads=1)
    assert one is not None
    for threads in (2, 4):
        assert diophantine.kronecker_search(tg, 1, 10 ** 6, threads=threads) == one


def test_kronecker_none_when_absent():
    # the qualifying integers near the bottom are 6 and 13; nothing between
    tg = diophantine.KroneckerTarget.for_threshold(2.0, 0.25)
    assert diophantine.kronecker_search(tg, 7, 12) is None
    assert diophantine.kronecker_search(tg, 7, 13) == 13


# ---------------------------------------------------------------------------
# discrepancy
# ---------------------------------------------------------------------------


def disc_brute(pts):
    """Sup over boxes with edges near point coordinates, any boundary mix."""
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n, s = pts.shape
    eps = 1e-9
    cands = []
    for d in range(s):
        c = {0.0, 1.0}
        for x in pts[:, d]:
            c |= {max(x - eps, 0.0), x, min(x + eps, 1.0)}
        cands.append(sorted(c))
    best = 0.0
    for lo in itertools.product(*cands):
        for hi in itertools.product(*cands):
            if any(a > b for a, b in zip(lo, hi)):
                continue
            vol = 1.0
            for a, b in zip(lo, hi):
                vol *= b - a
            inside = np.ones(n, dtype=bool)
            for d in range(s):
                inside &= (pts[:, d] >= lo[d]) & (pts[:, d] <= hi[d])
            best = max(best, abs(inside.sum() / n - vol))
    return best


def test_discrepancy_equally_spaced():
    for N in (10, 100):
        res = diophantine.discrepancy_mod1(np.arange(N) / N)
        assert res.exact
        assert res.value == pytest.approx(1.0 / N, abs=1e-12)


def test_discrepancy_degenerate():
    single = diophantine.discrepancy_mod1([0.3])
    assert single.value >= 0.5  # in fact exactly 1: the degenerate closed box
    assert single.value == pytest.approx(1.0, abs=1e-12)
    clustered = diophantine.discrepancy_mod1([0.3] * 7)
    assert clustered.value == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_discrepancy_1d_against_brute(seed):
    rng = np.random.default_rng(seed)
    pts = rng.random(7)
    got = diophantine.discrepancy_mod1(pts)
    assert got.exact
    assert got.value == pytest.approx(disc_brute(pts), abs=1e-6)


@pytest.mark.parametrize("seed", [3, 4])
def test_discrepancy_2d_against_brute(seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((6, 2))
    got = diophantine.discrepancy_mod1(pts)
    assert got.exact
    assert got.value == pytest.approx(disc_brute(pts), abs=1e-6)


def test_discrepancy_kronecker_sequence_trend():
    vals = []
    for N in (10 ** 2, 10 ** 3, 10 ** 4):
        pts = np.mod(np.arange(1, N + 1) * math.sqrt(2.0), 1.0)
        vals.append(diophantine.discrepancy_mod1(pts).value)
    assert vals[0] > vals[1] > vals[2]


def test_discrepancy_estimator_flagged():
    rng = np.random.default_rng(5)
    pts = rng.random((50, 3))
    res = diophantine.discrepancy_mod1(pts)
    assert not res.exact
    assert 0.0 < res.value <= 1.0
    # clustered points leave huge empty boxes: the estimate must see them
    clustered = diophantine.discrepancy_mod1(np.full((20, 3), 0.3))
    assert not clustered.exact
    assert clustered.value > 0.5


# ---------------------------------------------------------------------------
# Besicovitch certificate
# ---------------------------------------------------------------------------


def test_besicovitch_single():
    cert = diophantine.besicovitch_check([2], 1)
    assert cert.min_dist == pytest.approx(math.sqrt(2) - 1, rel=1e-12)
    assert cert.witness == (1,)


def test_besicovitch_pair_frozen():
    cert = diophantine.besicovitch_check([2, 3], 3)
    # frozen from a 40-digit exhaustive enumeration: 2*sqrt(2) + 3*sqrt(3)
    assert cert.min_dist == pytest.approx(0.02457954745282187, rel=1e-10)
    assert cert.witness == (2, 3)
    x = sum(h * math.sqrt(q) for h, q in zip(cert.witness, (2, 3)))
    assert diophantine.dist_nearest_int(x) == pytest.approx(cert.min_dist, rel=1e-12)


def test_besicovitch_monotone_in_h_max():
    prev = math.inf
    for H in (1, 2, 3):
        cur = diophantine.besicovitch_check([2, 3], H).min_dist
        assert cur <= prev
        prev = cur


def test_besicovitch_budget():
    with pytest.raises(BudgetExceeded):
        diophantine.besicovitch_check(list(range(2, 30)), 4)
    with pytest.raises(DomainError):
        diophantine.besicovitch_check([], 1)
