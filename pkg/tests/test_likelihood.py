import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import grid_profile, raw_loglik
from symve import (
    DomainError,
    NumericError,
    RiskPair,
    TwoArmCounts,
    UndefinedEffectError,
    loglik,
    lrt_statistic,
    profile_loglik,
)
from symve.likelihood import lrt_arrays, max_loglik, profile_arrays


@st.composite
def counts(draw, n_max=200):
    n0 = draw(st.integers(1, n_max))
    n1 = draw(st.integers(1, n_max))
    x0 = draw(st.integers(0, n0))
    x1 = draw(st.integers(0, n1))
    if x0 + x1 == 0:
        x0 = 1
    return TwoArmCounts(x0, n0, x1, n1)


open_s = st.floats(min_value=-0.999, max_value=0.999)


def test_loglik_conventions():
    c = TwoArmCounts(0, 10, 10, 10)
    assert loglik(c, RiskPair(0.0, 1.0)) == 0.0
    assert loglik(c, RiskPair(0.5, 1.0)) == pytest.approx(10 * math.log(0.5))
    assert loglik(c, RiskPair(0.5, 0.0)) == -math.inf
    c = TwoArmCounts(3, 10, 4, 12)
    ref = 3 * math.log(0.2) + 7 * math.log(0.8) + 4 * math.log(0.3) + 8 * math.log(0.7)
    assert loglik(c, RiskPair(0.2, 0.3)) == pytest.approx(ref, rel=1e-14)


def test_profile_at_estimate_equals_max():
    c = TwoArmCounts(100, 1000, 50, 1000)
    p = profile_loglik(c, 0.5)
    assert p.loglik == pytest.approx(max_loglik(c), abs=1e-9)
    assert p.risks.p0 == pytest.approx(0.1, abs=1e-9) and p.risks.p1 == pytest.approx(0.05, abs=1e-9)
    assert lrt_statistic(c, 0.5).value == 0.0


@pytest.mark.parametrize("s", [-0.9, -0.3, 0.0, 0.2, 0.7, 0.99])
@pytest.mark.parametrize("c", [TwoArmCounts(100, 1000, 50, 1000), TwoArmCounts(0, 30, 5, 40),
                               TwoArmCounts(20, 20, 3, 50), TwoArmCounts(11, 609, 32, 1211)])
def test_exact_matches_golden_and_grid(c, s):
    exact = profile_loglik(c, s)
    golden = profile_loglik(c, s, solver="golden")
    ref = grid_profile(c.x0, c.n0, c.x1, c.n1, s)
    assert golden.loglik == pytest.approx(exact.loglik, abs=1e-9)
    assert exact.loglik == pytest.approx(ref, abs=1e-6)
    assert exact.loglik >= ref - 1e-9


def test_domain_errors():
    c = TwoArmCounts(3, 10, 4, 10)
    for s in (1.0, -1.0, 2.0):
        with pytest.raises(DomainError):
            profile_loglik(c, s)
    with pytest.raises(UndefinedEffectError):
        lrt_statistic(TwoArmCounts(0, 10, 0, 10), 0.1)
    with pytest.raises(DomainError):
        profile_loglik(c, 0.1, solver="newton")


@settings(max_examples=150, deadline=None)
@given(counts(), open_s)
def test_lrt_nonnegative_and_profile_bounded(c, s):
    lam = lrt_statistic(c, s)
    assert lam.value >= 0 and lam.s == s and lam.lam == lam.value
    assert profile_loglik(c, s).loglik <= max_loglik(c) + 1e-9


@settings(max_examples=100, deadline=None)
@given(counts(), open_s)
def test_arm_swap_mirrors_profile(c, s):
    a = profile_loglik(c, s).loglik
    b = profile_loglik(c.swapped(), -s).loglik
    assert a == pytest.approx(b, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(counts())
def test_profile_lrt_duality_on_grid(c):
    # Lambda(s) is exactly twice the gap between the maximum and the profile,
    # and the profile is the constrained maximum of the raw likelihood
    s = np.linspace(-0.98, 0.98, 41)
    ll, p = profile_arrays(c.x0, c.n0, c.x1, c.n1, s)
    lam = lrt_arrays(c.x0, c.n0, c.x1, c.n1, s)
    assert np.allclose(lam, np.maximum(2 * (max_loglik(c) - ll), 0.0), atol=1e-9)
    for k in (0, 13, 20, 33, 40):
        assert lrt_statistic(c, float(s[k])).value == pytest.approx(lam[k], abs=1e-9)
    # perturbing the nuisance never improves on the solution
    for h in (1e-4, -1e-4):
        pp = np.clip(p + h, 0, 1)
        c_ = 1 - np.abs(s)
        p0 = np.where(s >= 0, pp, c_ * pp)
        p1 = np.where(s >= 0, c_ * pp, pp)
        with np.errstate(invalid="ignore"):
            other = raw_loglik(c.x0, c.n0, c.x1, c.n1, p0, p1)
        assert np.all(np.nan_to_num(other, nan=-np.inf) <= ll + 1e-9)


def test_negative_lambda_is_numeric_error(monkeypatch):
    import symve.likelihood as lk

    c = TwoArmCounts(3, 10, 4, 10)
    monkeypatch.setattr(lk, "max_loglik", lambda counts: -1e6)
    with pytest.raises(NumericError):
        lk.lrt_statistic(c, 0.1)


def test_loglik_hand_values():
    assert loglik(TwoArmCounts(5, 10, 5, 10), RiskPair(0.5, 0.5)) == pytest.approx(-13.8629, abs=1e-4)
    assert loglik(TwoArmCounts(0, 10, 0, 10), RiskPair(0.0, 0.0)) == 0.0
    c = TwoArmCounts(30, 100, 30, 100)
    p = profile_loglik(c, 0.0)
    assert p.nuisance == pytest.approx(0.3, abs=1e-12)
    assert p.loglik == pytest.approx(loglik(c, RiskPair(0.3, 0.3)), abs=1e-10)


def test_profile_spec_grid_oracle():
    c = TwoArmCounts(100, 1000, 50, 1000)
    grid = np.arange(1, 10000) / 10000
    coarse = np.max(raw_loglik(100, 1000, 50, 1000, grid, 0.7 * grid))
    got = profile_loglik(c, 0.3)
    # a 1e-4 grid misses the maximizer by up to 5e-5; bound the loss by the curvature there
    p = got.nuisance
    curv = 100 / p**2 + 900 / (1 - p) ** 2 + 0.49 * (50 / (0.7 * p) ** 2 + 950 / (1 - 0.7 * p) ** 2)
    assert 0 <= got.loglik - coarse <= 0.5 * curv * 5e-5**2
    assert got.loglik == pytest.approx(grid_profile(100, 1000, 50, 1000, 0.3), abs=1e-6)
