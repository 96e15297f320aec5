import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coexsim.diffusion import (FellerSpec, LotkaVolterraParams, TimeGrid, estimate_hitting_probability,
                               exit_probability, exit_probability_supercritical, integrate_lotka_volterra,
                               scale_function, step_feller, step_wright_fisher)
from coexsim.errors import CensoredError, DomainError, ParameterError
from coexsim.rng import NoiseStream


# ---- step_feller

@pytest.mark.parametrize("dW", [-3.0, 0.0, 2.5])
def test_zero_is_absorbing_for_supercritical(dW):
    assert step_feller(0.0, FellerSpec.supercritical(2.0), 0.1, dW) == 0.0


def test_immigration_from_zero_moves_by_drift_times_dt():
    assert step_feller(0.0, FellerSpec.with_immigration(1.0, 0.0), 0.01, 0.0) == pytest.approx(0.01, abs=1e-15)


def test_logistic_fixed_point_has_zero_drift():
    spec = FellerSpec.logistic(alpha=1.5, cap=2.0, lam=2.0)
    assert step_feller(1.0, spec, 0.05, 0.0) == 1.0


def test_negative_state_rejected():
    with pytest.raises(ParameterError):
        step_feller(-0.1, FellerSpec.supercritical(1.0), 0.01, 0.0)


def test_nonpositive_dt_rejected():
    with pytest.raises(ParameterError):
        step_feller(1.0, FellerSpec.supercritical(1.0), 0.0, 0.0)


@given(z=st.floats(0, 50), d1=st.floats(-5, 5), dW=st.floats(-10, 10), dt=st.floats(1e-5, 0.5))
def test_step_feller_never_negative(z, d1, dW, dt):
    assert step_feller(z, FellerSpec.supercritical(d1), dt, dW) >= 0.0


def test_subcritical_spec_requires_level_condition():
    with pytest.raises(ParameterError):
        FellerSpec.subcritical(1.0, 2.0, 1.0, 3.0)


# ---- closed forms

def test_driftless_case_is_linear():
    assert exit_probability_supercritical(0.0, 1.0, 2.0, 1.5) == 0.5


def test_unbounded_upper_level_gives_exponential():
    assert exit_probability_supercritical(1.0, 0.0, math.inf, 1.0) == pytest.approx(math.exp(-2.0), rel=1e-14)


def test_large_drift_bound():
    # a = M/K, b = 2M/K, z0 = 1.5 M/K: the probability sits below exp(-D1 M/K)
    for d1 in (5.0, 20.0, 80.0):
        for mk in (0.5, 1.0, 3.0):
            q = exit_probability_supercritical(d1, mk, 2 * mk, 1.5 * mk)
            assert q <= math.exp(-d1 * mk)


def test_closed_form_matches_quadrature_of_scale_density():
    for d1, a, b, z0 in [(0.7, 0.2, 3.0, 1.0), (-1.3, 0.1, 2.0, 0.4), (3.0, 0.5, 1.5, 0.9)]:
        spec = FellerSpec.supercritical(d1)
        num = scale_function(spec, b, ref=z0)
        den = scale_function(spec, b, ref=a)
        assert exit_probability_supercritical(d1, a, b, z0) == pytest.approx(num / den, rel=1e-9)


def test_extreme_drift_does_not_overflow():
    assert exit_probability_supercritical(500.0, 1.0, 10.0, 2.0) == pytest.approx(math.exp(-1000.0), rel=1e-9)
    assert exit_probability_supercritical(-500.0, 1.0, 10.0, 2.0) == pytest.approx(1.0)


@given(d1=st.floats(-20, 20), a=st.floats(0, 5), gap1=st.floats(0.01, 5), gap2=st.floats(0.01, 5))
def test_exit_probability_is_a_probability_and_decreasing_in_z0(d1, a, gap1, gap2):
    z0 = a + gap1
    b = z0 + gap2
    q = exit_probability_supercritical(d1, a, b, z0)
    assert 0.0 <= q <= 1.0
    q2 = exit_probability_supercritical(d1, a, b, z0 + gap2 / 2)
    assert q2 <= q + 1e-12


def test_exit_probability_domain():
    with pytest.raises(DomainError):
        exit_probability_supercritical(1.0, 2.0, 3.0, 1.0)


def test_logistic_exit_probability_between_linear_bounds():
    # near zero the logistic drift alpha(M - lam z) z lies between the linear drifts
    # alpha M z and alpha(M - lam b) z on [0, b], so its exit probability is bracketed
    al, M, lam, a, b, z0 = 1.0, 2.0, 0.5, 0.1, 2.0, 0.5
    q = exit_probability(FellerSpec.logistic(al, M, lam), a, b, z0)
    hi = exit_probability_supercritical(al * (M - lam * b), a, b, z0)
    lo = exit_probability_supercritical(al * M, a, b, z0)
    assert lo < q < hi


# ---- Monte Carlo hitting

def test_hitting_estimate_matches_exponential_tail():
    est = estimate_hitting_probability(FellerSpec.supercritical(1.0), 1.0, 0.001, 100.0, 4000,
                                       TimeGrid.from_horizon(15.0, 5e-3), seed=3)
    assert abs(est.estimate - exit_probability_supercritical(1.0, 0.001, 100.0, 1.0)) <= 3 * est.stderr
    assert abs(est.estimate - math.exp(-2.0)) < 0.03


def test_subcritical_hits_lower_level():
    spec = FellerSpec.supercritical(-3.0)
    est = estimate_hitting_probability(spec, 1.0, 0.01, 1e3, 2000, TimeGrid.from_horizon(20.0, 5e-3), seed=4)
    oracle = exit_probability_supercritical(-3.0, 0.01, 1e3, 1.0)
    assert oracle > 0.99
    assert est.estimate >= oracle - 3 * est.stderr - 1e-3


def test_hitting_estimate_is_reproducible():
    args = (FellerSpec.supercritical(0.5), 1.0, 0.2, 3.0, 500, TimeGrid.from_horizon(10.0, 1e-2))
    assert estimate_hitting_probability(*args, seed=11) == estimate_hitting_probability(*args, seed=11)


def test_censoring_is_reported():
    with pytest.raises(CensoredError) as info:
        estimate_hitting_probability(FellerSpec.supercritical(0.0), 1.0, 0.01, 100.0, 200,
                                     TimeGrid.from_horizon(0.05, 1e-2), seed=1)
    assert info.value.censored_fraction > 0.5


# ---- Wright-Fisher

@pytest.mark.parametrize("s,mu", [(0.0, 0.0), (3.0, 2.0), (-2.0, 0.5)])
def test_wright_fisher_boundaries_absorb(s, mu):
    assert step_wright_fisher(0.0, s, mu, 10.0, 0.1, 5.0) == 0.0
    assert step_wright_fisher(1.0, s, mu, 10.0, 0.1, -5.0) == 1.0


@given(p=st.floats(0, 1), s=st.floats(-20, 20), mu=st.floats(0, 3), dW=st.floats(-5, 5))
def test_wright_fisher_stays_in_unit_interval(p, s, mu, dW):
    out = step_wright_fisher(p, s, mu, 5.0, 0.01, dW)
    assert 0.0 <= out <= 1.0


def test_neutral_wright_fisher_conserves_mean():
    n, dt = 20000, 1e-2
    p = np.full(n, 0.3)
    noise = NoiseStream(5, 0)
    for k in range(100):
        p = step_wright_fisher(p, 0.0, 0.0, 4.0, dt, noise.increments(k, n, dt))
    se = p.std(ddof=1) / math.sqrt(n)
    assert abs(p.mean() - 0.3) <= 3 * se


# ---- Lotka-Volterra

def test_decoupled_logistic_reaches_capacities():
    traj = integrate_lotka_volterra(LotkaVolterraParams(1.0, 2.0, 3.0, 5.0), (1.5, 2.5), TimeGrid(0, 0.01, 3000))
    np.testing.assert_allclose(traj.states[-1], [3.0, 5.0], rtol=1e-8)


def test_symmetric_competition_equilibrium():
    params = LotkaVolterraParams(1.0, 1.0, 1.0, 1.0, 0.5, 0.5)
    assert params.equilibrium == pytest.approx((2 / 3, 2 / 3))
    traj = integrate_lotka_volterra(params, (0.1, 0.9), TimeGrid(0, 0.01, 5000))
    np.testing.assert_allclose(traj.states[-1], [2 / 3, 2 / 3], rtol=1e-6)
    assert traj.coexistence


def test_competitive_exclusion_flag():
    params = LotkaVolterraParams(1.0, 1.0, 1.0, 2.0, alpha12=1.0, alpha21=0.5)
    assert params.K1 < params.alpha12 * params.K2 and params.K2 > params.alpha21 * params.K1
    assert not params.coexistence
    traj = integrate_lotka_volterra(params, (0.5, 0.5), TimeGrid(0, 0.01, 4000))
    assert traj.states[-1, 0] < 1e-3


def test_rk4_matches_logistic_solution():
    # n' = n(1 - n) has n(t) = n0 e^t / (1 - n0 + n0 e^t)
    traj = integrate_lotka_volterra(LotkaVolterraParams(1.0, 1.0, 1.0, 1.0), (0.2, 0.0), TimeGrid(0, 0.05, 100))
    t = traj.times
    exact = 0.2 * np.exp(t) / (0.8 + 0.2 * np.exp(t))
    np.testing.assert_allclose(traj.states[:, 0], exact, rtol=1e-6)
    assert np.all(traj.states[:, 1] == 0.0)
