import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coexsim.errors import MuUndefinedError, ParameterError, PreconditionError, StateCorruptionError
from coexsim.lattice import RadialKernel
from coexsim.model_one import ModelOneParams
from coexsim.model_two import (ModelTwoParams, ModelTwoState, SpinFieldX, derive_params,
                               estimate_interior_occupation, from_x, selection_drift_x, selection_regime,
                               simulate_model_two, step_model_two, to_x)
from coexsim.rng import NoiseStream


def model_one(**kw):
    base = dict(d=1, torus_side=1, alpha=1.0, M=1.0, m=[0.0], lam=[2.0], gamma=[1.0],
                alpha_p=1.0, M_p=1.0, m_p=[0.0], lam_p=[2.0], gamma_p=[1.0])
    base.update(kw)
    return ModelOneParams(**base)


# ---- parameter reduction

def test_symmetric_hand_example():
    red = derive_params(model_one(), 10.0)
    assert (red.s, red.mu) == (10.0, 2.0)


def test_asymmetric_hand_example():
    red = derive_params(model_one(M=3.0, lam=[1.0], lam_p=[1.0], gamma=[0.0], gamma_p=[0.0]), 2.0)
    assert (red.s, red.mu) == (4.0, 1.0)


@given(a=st.floats(0.1, 3), M=st.floats(0.1, 5), lam=st.floats(0.1, 3), g=st.floats(0, 3), N=st.floats(0.5, 50))
def test_symmetric_parameters_give_mu_two(a, M, lam, g, N):
    p = model_one(alpha=a, M=M, lam=[lam], gamma=[g], alpha_p=a, M_p=M, lam_p=[lam], gamma_p=[g])
    if (lam - g) == 0:
        return
    red = derive_params(p, N)
    assert red.mu == pytest.approx(2.0, rel=1e-12)


def test_vanishing_selection_raises_with_s():
    with pytest.raises(MuUndefinedError) as info:
        derive_params(model_one(lam=[1.0], gamma=[1.0], lam_p=[1.0], gamma_p=[1.0]), 5.0)
    assert info.value.s == 0


def test_reduction_needs_equal_migration():
    p = ModelOneParams(1, 8, 1.0, 1.0, [0, 0.5], [1, 0.5], [0.2], 1.0, 1.0, [0, 0.25], [1, 0.5], [0.2])
    with pytest.raises(PreconditionError):
        derive_params(p, 3.0)


def test_regime_labels():
    assert selection_regime(0.0, 1.0) == "neutral"
    assert selection_regime(1.0, 2.0) == "heterozygote advantage"
    assert selection_regime(-1.0, 2.0) == "heterozygote disadvantage"
    assert selection_regime(1.0, 0.5) == "directional, favours X"


# ---- coordinates

def test_spin_coordinate_values():
    np.testing.assert_array_equal(to_x(np.array([0.5, 0.0, 1.0])).x, [0.0, 1.0, -1.0])


def test_round_trip_to_machine_precision():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        p = rng.random(rng.integers(1, 20))
        back = from_x(to_x(p)).p
        np.testing.assert_allclose(back, p, rtol=0, atol=2 * np.finfo(float).eps)


def test_out_of_range_rejected():
    with pytest.raises(StateCorruptionError):
        SpinFieldX([1.5])
    with pytest.raises(StateCorruptionError):
        ModelTwoState.from_p([-0.1])


def test_selection_drift_vanishes_at_half_for_mu_two():
    assert selection_drift_x(0.0, 7.0, 2.0) == 0.0


@given(x=st.floats(-1, 1), s=st.floats(-50, 50))
def test_symmetric_selection_drift_is_odd(x, s):
    assert selection_drift_x(-x, s, 2.0) == -selection_drift_x(x, s, 2.0)


# ---- stepping

def params2(s=1.0, mu=2.0, N=20.0, side=8, m=(0.0, 1.0)):
    return ModelTwoParams(1, side, list(m), s, mu, N)


@pytest.mark.parametrize("p0", [0.0, 1.0])
@pytest.mark.parametrize("m", [(0.0, 1.0), (0.3, 0.7, 0.1), (0.0, 0.1, 0.2, 0.3)])
def test_uniform_boundaries_are_fixed(p0, m):
    par = params2(s=3.0, mu=0.7, side=16, m=m)
    st_ = ModelTwoState.from_p(np.full((4, 16), p0))
    out = simulate_model_two(st_, par, 1e-2, 200, NoiseStream(1))
    np.testing.assert_array_equal(out.p, p0)


def test_mirror_symmetry_is_exact():
    par = params2(s=4.0, mu=2.0, side=8)
    rng = np.random.default_rng(3)
    x0 = rng.uniform(-1, 1, (5, 8))
    a = simulate_model_two(ModelTwoState(x0.copy()), par, 1e-3, 500, NoiseStream(6))
    b = simulate_model_two(ModelTwoState(-x0), par, 1e-3, 500, NoiseStream(6), mirror=True)
    np.testing.assert_array_equal(a.x, -b.x)


@given(seed=st.integers(0, 2**31), s=st.floats(-30, 30), mu=st.floats(0, 3))
def test_proportions_stay_in_unit_interval(seed, s, mu):
    par = params2(s=s, mu=mu, N=2.0)
    state = ModelTwoState.from_p(np.random.default_rng(seed).random((3, 8)))
    noise = NoiseStream(seed)
    for _ in range(30):
        state = step_model_two(state, par, 0.05, noise)
        assert np.all((state.p >= 0) & (state.p <= 1))


def test_neutral_mean_conserved_at_checkpoints():
    par = params2(s=0.0, mu=0.0, N=5.0, side=8)
    n = 4000
    p0 = np.linspace(0.1, 0.8, 8)
    state = ModelTwoState.from_p(np.broadcast_to(p0, (n, 8)).copy())
    target = p0.mean()
    checks = []

    def record(s):
        if s.step % 100 == 0:
            m = s.p.mean(axis=1)
            checks.append((m.mean(), m.std(ddof=1) / math.sqrt(n)))

    simulate_model_two(state, par, 1e-2, 300, NoiseStream(2), callback=record)
    assert len(checks) == 3
    for mean, se in checks:
        assert abs(mean - target) <= 3 * se


# ---- interior occupation

def test_absorbed_start_has_no_interior():
    occ = estimate_interior_occupation(params2(), 0.0, 0.1, 0.5, 50, seed=0, dt=1e-2)
    assert occ.somewhere == 0.0 and occ.origin == 0.0


def test_strong_balancing_selection_keeps_interior():
    par = ModelTwoParams(1, 64, [0.0, 1.0], 50.0, 2.0, 100.0)
    occ = estimate_interior_occupation(par, 0.5, 0.1, 20.0, 40, seed=1, dt=5e-3)
    assert occ.somewhere > 0.5


def test_interior_occupation_nondecreasing_in_s():
    res = []
    for s in (0.0, 5.0, 50.0):
        par = ModelTwoParams(1, 8, [0.0, 0.5], s, 2.0, 2.0)
        res.append(estimate_interior_occupation(par, 0.3, 0.1, 5.0, 400, seed=3, dt=5e-3))
    for lo, hi in zip(res, res[1:]):
        assert hi.somewhere >= lo.somewhere - 3 * math.hypot(lo.somewhere_se, hi.somewhere_se)
        assert hi.origin >= lo.origin - 3 * math.hypot(lo.origin_se, hi.origin_se)
    assert res[-1].somewhere > res[0].somewhere


# ---- boundary-exact scheme

def _bparams(**kw):
    base = dict(d=1, side=8, m=RadialKernel([0.0, 1.0]), s=0.0, mu=2.0, N=2.0)
    base.update(kw)
    return ModelTwoParams(base["d"], base["side"], base["m"], s=base["s"], mu=base["mu"], N=base["N"])


@pytest.mark.parametrize("p0", [0.0, 1.0])
def test_boundary_scheme_keeps_uniform_boundaries(p0):
    out = simulate_model_two(ModelTwoState.from_p(np.full((5, 8), p0)), _bparams(s=3.0), 1e-2, 50,
                             NoiseStream(1), scheme="boundary")
    assert np.all(out.p == p0)


@given(seed=st.integers(0, 2**31), s=st.floats(0, 10), mu=st.floats(0.5, 3))
def test_boundary_scheme_stays_in_unit_interval(seed, s, mu):
    x0 = np.random.default_rng(seed).uniform(-1, 1, (3, 8))
    out = simulate_model_two(ModelTwoState(x0), _bparams(s=s, mu=mu), 1e-2, 20, NoiseStream(seed),
                             scheme="boundary")
    assert np.all(np.abs(out.x) <= 1.0)


def test_boundary_scheme_conserves_neutral_mean():
    n, p0 = 20000, 0.3
    out = simulate_model_two(ModelTwoState.from_p(np.full((n, 8), p0)), _bparams(N=1.0), 4e-3, 250,
                             NoiseStream(2), scheme="boundary")
    v = out.p[:, 0]
    assert abs(v.mean() - p0) <= 3 * v.std(ddof=1) / math.sqrt(n)


def test_mirror_requires_euler():
    with pytest.raises(ParameterError):
        step_model_two(ModelTwoState(np.zeros(8)), _bparams(), 1e-3, NoiseStream(0), mirror=True, scheme="boundary")
