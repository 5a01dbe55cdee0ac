import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sando.cme import (
    FieldState,
    InitialConditions,
    IntegratorSettings,
    MixingFactors,
    conserved_quantities,
    conserved_terms,
    gain_db_from_trajectory,
    initial_state,
    integrate,
    rhs,
    sample_grid,
)
from sando.dispersion import mode_triple
from sando.errors import InvalidParameterError, StiffnessError
from sando.units import AmplitudeConvention, current_to_amplitude, normalize, table1_params


@pytest.fixture
def setup(table1):
    m = table1(0.75)
    t = mode_triple(7e9, 10e9, m)
    return m, t, MixingFactors.for_triple(t, m.geometry)


def test_fixed_point_without_mixing(setup):
    m, t, mix = setup
    t0 = dataclasses.replace(t, delta_k_L=0.0)
    # a zero linear mismatch makes the cross-term factor equal the self factor
    mix0 = dataclasses.replace(mix, diamond_self=0.0, diamond_dk=0.0)
    d = rhs(FieldState(1.0, 0.1, 0.01, 0.0), t0, mix0)
    assert (d.xi_p, d.xi_s, d.xi_i) == (0.0, 0.0, 0.0)
    assert d.theta_big == pytest.approx(0.0, abs=1e-18)


def test_pump_alone_has_no_amplitude_change(setup):
    m, t, mix = setup
    d = rhs(FieldState(1.0, 1e-30, 1e-30, 0.7), t, mix)
    assert abs(d.xi_p) < 1e-55


@given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(1e-4, 1e-1), st.floats(1e-6, 1e-1))
def test_theta_flip_parity(theta, xp, xs, xi):
    m = normalize(table1_params(), 0.75)
    t = mode_triple(7e9, 10e9, m)
    mix = MixingFactors.for_triple(t, m.geometry)
    a = rhs(FieldState(xp, xs, xi, theta), t, mix)
    b = rhs(FieldState(xp, xs, xi, -theta), t, mix)
    for name in ("xi_p", "xi_s", "xi_i"):
        assert getattr(b, name) == pytest.approx(-getattr(a, name), rel=1e-12, abs=1e-300)
    assert b.theta_big == pytest.approx(a.theta_big, rel=1e-12)


def test_rhs_against_direct_formula(setup):
    m, t, mix = setup
    xp, xs, xi, th = 1.7, 2e-3, 3e-5, 0.4
    d = rhs(FieldState(xp, xs, xi, th), t, mix)
    kp, ks, ki = t.k_p, t.k_s, t.k_i
    P = kp ** 2 * ks * ki * mix.diamond_dk
    assert d.xi_p == pytest.approx(P / (8 * t.omega_p ** 2 * mix.club_p) * (ks + ki - kp) * xs * xi * xp * math.sin(th), rel=1e-13)
    assert d.xi_s == pytest.approx(P / (16 * t.omega_s ** 2 * mix.club_s) * (ki - 2 * kp) * xp ** 2 * xi * math.sin(th), rel=1e-13)
    assert d.xi_i == pytest.approx(P / (16 * t.omega_i ** 2 * mix.club_i) * (ks - 2 * kp) * xp ** 2 * xs * math.sin(th), rel=1e-13)


def test_rhs_rejects_nonpositive(setup):
    m, t, mix = setup
    with pytest.raises(InvalidParameterError):
        rhs(FieldState(1.0, 0.0, 1e-3, 0.0), t, mix)


def test_initial_state_uses_per_mode_wavenumber(setup):
    m, t, _ = setup
    ic = InitialConditions(theta_p=0.3, theta_s=0.1, theta_i=-0.2)
    y = initial_state(t, m, ic)
    conv = AmplitudeConvention.RMS_JUNCTION
    assert y.xi_p == pytest.approx(current_to_amplitude(0.5, t.k_p, conv, m.geometry))
    assert y.xi_s == pytest.approx(current_to_amplitude(0.5e-5, t.k_s, conv, m.geometry))
    assert y.xi_i == pytest.approx(current_to_amplitude(0.5e-8, t.k_i, conv, m.geometry))
    assert y.theta_big == pytest.approx(0.6 - 0.1 + 0.2)


def test_zero_seed_is_floored(setup):
    m, t, _ = setup
    y = initial_state(t, m, InitialConditions(is_over_ip=0.0, ii_over_ip=0.0))
    assert y.xi_s == y.xi_i == pytest.approx(1e-16 * y.xi_p)


def test_pure_pump_is_constant(setup):
    m, t, _ = setup
    tr = integrate(t, m, InitialConditions(is_over_ip=0.0, ii_over_ip=0.0))
    assert np.max(np.abs(tr.xi_p / tr.xi_p[0] - 1)) < 1e-20


def test_sampling_and_length(setup):
    m, t, _ = setup
    tr = integrate(t, m)
    assert tr.x[0] == 0 and tr.x[-1] == 666
    assert np.all(np.diff(tr.x) > 0)
    assert tr.n_jj[-1] == 1998
    np.testing.assert_array_equal(sample_grid(2.5, 1.0), [0, 1, 2, 2.5])


def test_gain_definition(setup):
    m, t, _ = setup
    tr = integrate(t, m)
    g = gain_db_from_trajectory(tr)
    assert g[0] == 0.0
    assert g[-1] == pytest.approx(20 * math.log10(tr.xi_s[-1] / tr.xi_s[0]))


def test_ten_fold_amplitude_is_twenty_db(setup):
    m, t, _ = setup
    tr = integrate(t, m)
    fake = dataclasses.replace(tr, states=np.array([[1, 1, 1, 0], [1, 10, 1, 0]], float), x=np.array([0.0, 1.0]))
    assert gain_db_from_trajectory(fake)[-1] == pytest.approx(20.0)


@pytest.mark.parametrize("x0, f_s", [(0.75, 7e9), (1 / 3, 10.05e9), (0.2, 4e9), (0.5, 13e9)])
def test_conserved_quantities(table1, x0, f_s):
    m = table1(x0)
    tr = integrate(mode_triple(f_s, 10e9, m), m)
    for c in conserved_quantities(tr):
        assert np.max(np.abs(c - c[0])) / abs(c[0]) < 1e-8


def test_sum_combination_is_not_conserved(table1):
    # only the difference of the pump and signal terms is a constant of motion
    m = table1(0.75)
    tr = integrate(mode_triple(10.05e9, 10e9, m), m)
    pump, sig, _ = conserved_terms(tr)
    good, bad = pump - sig, pump + sig
    assert np.ptp(good) / abs(good[0]) < 1e-10
    assert np.ptp(bad) / abs(bad[0]) > 1e3 * np.ptp(good) / abs(good[0])


def test_step_halving(table1):
    m = table1(0.75)
    t = mode_triple(8e9, 10e9, m)
    a = gain_db_from_trajectory(integrate(t, m))[-1]
    b = gain_db_from_trajectory(integrate(t, m, settings=IntegratorSettings(max_step=0.25, rtol=5e-11)))[-1]
    assert abs(a - b) < 1e-6


def test_pump_depletion_bound(table1):
    for x0 in (0.2, 1 / 3, 0.5, 0.75):
        m = table1(x0)
        tr = integrate(mode_triple(10.05e9, 10e9, m), m)
        assert np.max(np.abs(tr.xi_p / tr.xi_p[0] - 1)) < 1e-3


def test_oscillating_gain_at_equal_spacing(table1):
    m = table1(1 / 3)
    tr = integrate(mode_triple(10.05e9, 10e9, m), m, length=66666.0, stride=10.0)
    g = gain_db_from_trajectory(tr)
    turns = np.nonzero(np.diff(np.sign(np.diff(g))))[0]
    flips = np.nonzero(np.diff(np.sign(np.sin(tr.theta[1:]))))[0]
    assert len(turns) >= 3
    # every gain extremum sits where sin(Theta) changes sign
    for i in turns:
        assert np.min(np.abs(flips - i)) <= 2
    assert np.max(np.abs(tr.xi_p / tr.xi_p[0] - 1)) < 1e-3


def test_stiffness_reports_position(setup):
    m, t, _ = setup
    with pytest.raises(StiffnessError) as err:
        integrate(t, m, settings=IntegratorSettings(max_steps=5))
    assert err.value.x is not None


def test_geometry_ordering_at_device_length(table1):
    gains = {}
    for x0 in (0.2, 1 / 3, 0.5, 0.75):
        m = table1(x0)
        gains[x0] = gain_db_from_trajectory(integrate(mode_triple(10.05e9, 10e9, m), m))[-1]
    assert gains[0.75] > gains[0.5] > gains[0.2] > gains[1 / 3]


def test_deterministic(setup):
    m, t, _ = setup
    a, b = integrate(t, m), integrate(t, m)
    np.testing.assert_array_equal(a.states, b.states)
