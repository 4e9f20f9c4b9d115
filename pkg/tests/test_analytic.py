"""Closed forms versus the exact engine, and the real-clock damping laws."""

import cmath
import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from spinchamber import (
    CODATA2018,
    ClockParams,
    ExperimentConfig,
    QubitState,
    WeakCouplingWarning,
    damp_off_diagonals,
    decoherence_factor,
    evolve_sequential,
    off_diagonal_damping,
    partial_trace_env,
    reduced_density_matrix,
    weak_coupling_branches,
    x_string_expectation,
    x_string_expectation_realclock,
    x_string_expectation_realclock_log,
    x_string_expectation_unitary,
)

from conftest import random_config, random_qubit

INV_SQRT2 = 1.0 / math.sqrt(2.0)


# -- clock parameters ------------------------------------------------------


def test_clock_params_frozen():
    clk = ClockParams.for_flight_time(1.0, T_exp=0.0)
    assert clk.theta == pytest.approx(3.0549926680193422e-58, rel=1e-13)
    clk2 = ClockParams.for_flight_time(1e-6, T_exp=0.0)
    assert clk2.theta == pytest.approx(3.0549926680193422e-62, rel=1e-13)
    # theta scales as tau^(2/3).
    assert clk.theta / clk2.theta == pytest.approx(1e4, rel=1e-12)
    assert ClockParams.ideal().theta == 0.0


def test_clock_params_validation():
    with pytest.raises(ValueError):
        ClockParams(theta=-1e-60, T_exp=0.0)
    with pytest.raises(ValueError):
        ClockParams(theta=0.0, T_exp=-1.0)
    with pytest.raises(ValueError):
        ClockParams.for_flight_time(0.0, 1.0)


def test_clock_for_config(rng):
    cfg = random_config(rng, 2, tau=0.25)
    clk = ClockParams.for_config(cfg)
    assert clk.T_exp == cfg.T_total
    assert clk.theta == ClockParams.for_flight_time(0.25, 0.0).theta


# -- branch states ---------------------------------------------------------


def test_branches_exact_in_dephasing_mode(rng):
    # The defining property of the branch form: with the coupling truncated
    # to its sz x sz part (and Zeeman phases stripped), it is exact.
    for n_env in (1, 2, 4):
        cfg = random_config(rng, n_env, f_scale=3.0, omega1=50.0, omega2=10.0)
        exact = evolve_sequential(cfg, interaction_picture=True, dephasing=True)
        branch = weak_coupling_branches(cfg).to_state_vector()
        assert_allclose(branch.amps, exact.amps, atol=1e-12)


def test_branch_phases():
    plus = QubitState(INV_SQRT2, INV_SQRT2)
    cfg = ExperimentConfig.from_frequencies(plus, [plus], f=0.4, omega1=100.0, tau=1.0)
    br = weak_coupling_branches(cfg)
    assert br.up_amp == plus.up and br.down_amp == plus.down
    ph = cmath.exp(-0.4j)
    assert br.env_up[0].up == pytest.approx(INV_SQRT2 * ph)
    assert br.env_up[0].down == pytest.approx(INV_SQRT2 * ph.conjugate())
    # The central-down branch carries the opposite phases.
    assert br.env_down[0].up == pytest.approx(INV_SQRT2 * ph.conjugate())
    assert br.env_down[0].down == pytest.approx(INV_SQRT2 * ph)


def test_weak_coupling_warning():
    plus = QubitState(INV_SQRT2, INV_SQRT2)
    strong = ExperimentConfig.from_frequencies(plus, [plus], f=30.0, omega1=100.0)
    with pytest.warns(WeakCouplingWarning):
        weak_coupling_branches(strong)
    resonant = ExperimentConfig.from_frequencies(plus, [plus], f=1.0, omega1=0.0)
    with pytest.warns(WeakCouplingWarning):
        weak_coupling_branches(resonant)
    weak = ExperimentConfig.from_frequencies(plus, [plus], f=1.0, omega1=100.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        weak_coupling_branches(weak)


def test_branch_fidelity_gap_small(rng):
    # Full Heisenberg mode: the branch form is approximate, with an
    # infidelity of order (f / detuning)^2.
    cfg = random_config(rng, 2, f_scale=0.1, omega1=10.0, omega2=0.0)
    exact = evolve_sequential(cfg, interaction_picture=True)
    approx = weak_coupling_branches(cfg).to_state_vector()
    fid = abs(np.vdot(exact.amps, approx.amps)) ** 2
    assert 1.0 - fid <= 10.0 * (0.1 / 10.0) ** 2


# -- decoherence factor ----------------------------------------------------


def test_decoherence_factor_frozen():
    # One spin, population difference 0.28, f*tau = 0.45.
    state = QubitState.renormalize(0.8, 0.6)  # |up|^2 - |down|^2 = 0.28
    cfg = ExperimentConfig.from_frequencies(
        QubitState(INV_SQRT2, INV_SQRT2), [state], f=0.45, omega1=100.0
    )
    z = decoherence_factor(cfg)
    assert z.real == pytest.approx(0.62160996827066446, rel=1e-12)
    assert z.imag == pytest.approx(-0.21933153469569535, rel=1e-12)
    assert abs(z) == pytest.approx(0.65917014098442405, rel=1e-12)


def test_decoherence_factor_magnitude_bounded(rng):
    for n_env in (1, 3, 6):
        cfg = random_config(rng, n_env, f_scale=5.0, omega1=100.0)
        assert abs(decoherence_factor(cfg)) <= 1.0 + 1e-12


def test_decoherence_factor_empty_env(rng):
    cfg = random_config(rng, 0)
    assert decoherence_factor(cfg) == 1.0 + 0.0j


def test_decoherence_factor_matches_exact_trace(rng):
    # In dephasing mode z is exactly the ratio of the reduced coherence to
    # the initial one (interaction picture).
    for n_env in (1, 2, 5):
        cfg = random_config(rng, n_env, f_scale=2.0, omega1=30.0, omega2=5.0)
        psi = evolve_sequential(cfg, interaction_picture=True, dephasing=True)
        rho = partial_trace_env(psi)
        ab = cfg.central.coherence
        if abs(ab) > 1e-6:
            assert rho.off_diagonal / ab == pytest.approx(
                decoherence_factor(cfg), abs=1e-12
            )


def test_reduced_density_matrix(rng):
    for n_env in (1, 3):
        cfg = random_config(rng, n_env, f_scale=2.0, omega1=40.0, omega2=8.0)
        got = reduced_density_matrix(cfg)
        want = partial_trace_env(
            evolve_sequential(cfg, interaction_picture=True, dephasing=True)
        )
        assert_allclose(got.matrix, want.matrix, atol=1e-12)


def test_reduced_density_matrix_lab_frame_phase(rng):
    # Without the interaction picture the coherence additionally precesses
    # by exp(-2 i N omega1 tau); the environment Zeeman phases cancel in
    # the trace.
    cfg = random_config(rng, 3, f_scale=2.0, omega1=4.0, omega2=1.0, tau=0.4)
    lab = partial_trace_env(evolve_sequential(cfg, dephasing=True))
    predicted = (
        cfg.central.coherence
        * decoherence_factor(cfg)
        * cmath.exp(-2j * cfg.n_env * cfg.omega_central() * cfg.tau)
    )
    assert lab.off_diagonal == pytest.approx(predicted, abs=1e-12)


# -- X-string closed forms -------------------------------------------------


def test_unitary_x_string_empty_env():
    a = QubitState.renormalize(0.8, 0.6j)
    cfg = ExperimentConfig.from_frequencies(a, [], f=[], omega1=7.0)
    assert x_string_expectation_unitary(cfg) == pytest.approx(2 * (a.coherence).real)


def test_unitary_x_string_tracks_exact_when_env_field_off(rng):
    # The single-phase form assumes the environment Zeeman precession is
    # negligible; with omega2 = 0 and weak coupling it tracks the engine.
    # The residual error is first order in f/detuning (the closed form
    # drops the eigenvector rotation of the swap channel), so shrink the
    # coupling rather than the tolerance.
    cfg = random_config(rng, 2, f_scale=1e-3, omega1=10.0, omega2=0.0, tau=1.0)
    got = x_string_expectation_unitary(cfg)
    want = x_string_expectation(evolve_sequential(cfg))
    assert got == pytest.approx(want, abs=1e-4)


def test_unitary_x_string_phase_frequency():
    # Per-spin phase advance is 2*sqrt(4 f^2 + detuning^2)*tau.
    plus = QubitState(INV_SQRT2, INV_SQRT2)
    f, om = 0.3, 2.0
    omega_pair = math.sqrt(4 * f**2 + om**2)
    for tau in (0.1, 0.7):
        cfg = ExperimentConfig.from_frequencies(plus, [plus], f=f, omega1=om, tau=tau)
        assert x_string_expectation_unitary(cfg) == pytest.approx(
            math.cos(2 * omega_pair * tau), rel=1e-12
        )


def test_realclock_ideal_clock_matches_hand_formula(rng):
    # theta = 0: no damping, phase 2 N Omega T_exp, per-spin factor 2 Re u.
    cfg = random_config(rng, 3, f_scale=0.0, omega1=9.0, omega2=2.0, tau=0.5)
    clk = ClockParams(theta=0.0, T_exp=0.5)
    got = x_string_expectation_realclock(cfg, clk)
    om = cfg.omega_diff()
    pref = cfg.central.coherence * cmath.exp(-2j * cfg.n_env * om * clk.T_exp)
    for spin in cfg.env:
        pref *= spin.state.x_overlap
    assert got == pytest.approx(2 * pref.real, rel=1e-12, abs=1e-12)
    # ... and with f = 0 it coincides with the per-spin-phase form when the
    # pair frequency reduces to the detuning (phase accumulated over tau).
    assert got == pytest.approx(x_string_expectation_unitary(cfg), rel=1e-10)


def test_realclock_requires_uniform_coupling(rng):
    cfg = random_config(rng, 3, f_scale=2.0, omega1=10.0)
    with pytest.raises(ValueError, match="identical couplings"):
        x_string_expectation_realclock(cfg, ClockParams.ideal())


def test_realclock_log_matches_float(rng):
    # Moderate damping, still in float range: both paths must agree.
    cfg = ExperimentConfig.from_frequencies(
        random_qubit(rng),
        [random_qubit(rng) for _ in range(3)],
        f=1.0,
        omega1=5.0,
        omega2=1.0,
        tau=1.0,
    )
    clk = ClockParams(theta=1e-3, T_exp=2.0)
    f_val = x_string_expectation_realclock(cfg, clk)
    lm = x_string_expectation_realclock_log(cfg, clk)
    assert lm.to_float() == pytest.approx(f_val, rel=1e-10)


def test_realclock_log_deep_damping():
    # Damping exponent 1e5 nats: float version underflows to 0, log version
    # keeps the 43429-decade magnitude.
    plus = QubitState(INV_SQRT2, INV_SQRT2)
    cfg = ExperimentConfig.from_frequencies(plus, [plus], f=0.0, omega1=1.0, tau=1.0)
    theta = 2.5e4  # 4 * 1 * 1^2 * theta = 1e5
    clk = ClockParams(theta=theta, T_exp=0.0)
    assert x_string_expectation_realclock(cfg, clk) == 0.0
    lm = x_string_expectation_realclock_log(cfg, clk)
    assert lm.sign == 1  # cos(0) > 0 phase, positive coherence
    # 2 * (1/2) * (2 Re u = 1 ... here u = 1/2, x = exp(-0)) -> prefactor 1.
    assert lm.log10_mag == pytest.approx(-1e5 * math.log10(math.e), rel=1e-12)


def test_realclock_damping_monotone_for_real_amplitudes(rng):
    # For real environment amplitudes the per-spin factor is u(1+x)
    # with x decreasing in theta, so |<M>| is non-increasing in theta.
    central = random_qubit(rng)
    env = []
    for _ in range(3):
        v = rng.normal(size=2)
        env.append(QubitState.renormalize(v[0], v[1]))
    cfg = ExperimentConfig.from_frequencies(
        central, env, f=0.5, omega1=3.0, omega2=1.0, tau=1.0
    )
    thetas = [0.0, 1e-3, 1e-2, 1e-1, 1.0]
    mags = [
        abs(x_string_expectation_realclock(cfg, ClockParams(t, 1.0))) for t in thetas
    ]
    for lo, hi in zip(mags[1:], mags[:-1]):
        assert lo <= hi + 1e-15


def test_realclock_zero_cases():
    up = QubitState(1.0, 0.0)
    plus = QubitState(INV_SQRT2, INV_SQRT2)
    # No central coherence: signal identically zero.
    cfg = ExperimentConfig.from_frequencies(up, [plus], f=0.0, omega1=1.0)
    lm = x_string_expectation_realclock_log(cfg, ClockParams.ideal())
    assert lm.sign == 0
    # z-polarised environment spin: its x overlap kills the product.
    cfg2 = ExperimentConfig.from_frequencies(plus, [up], f=0.0, omega1=1.0)
    assert x_string_expectation_realclock_log(cfg2, ClockParams.ideal()).sign == 0


# -- generic damping law ---------------------------------------------------


def test_off_diagonal_damping_frozen():
    # omega = 1e22 rad/s over the age of the universe, ~0.3% suppression.
    got = off_diagonal_damping(1e22, 1e17)
    assert got == pytest.approx(0.9970790378, rel=1e-9)
    assert off_diagonal_damping(0.0, 1e17) == 1.0
    assert off_diagonal_damping(1e22, 0.0) == 1.0


def test_off_diagonal_damping_range(rng):
    for _ in range(50):
        om = 10.0 ** rng.uniform(0, 25)
        T = 10.0 ** rng.uniform(-9, 17)
        v = off_diagonal_damping(om, T)
        assert 0.0 < v <= 1.0


def test_off_diagonal_damping_underflow():
    assert off_diagonal_damping(1e45, 1e17) == 0.0


def test_off_diagonal_damping_validation():
    with pytest.raises(ValueError):
        off_diagonal_damping(1.0, -1.0)
    with pytest.raises(ValueError):
        off_diagonal_damping(math.inf, 1.0)


def test_off_diagonal_damping_sign_symmetric():
    assert off_diagonal_damping(-3e21, 1e17) == off_diagonal_damping(3e21, 1e17)


def test_damp_off_diagonals(rng):
    w = np.array([0.0, 2e21, 5e21])
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    rho = rho / np.trace(rho).real
    out = damp_off_diagonals(rho, w, 1e17)
    assert_allclose(np.diag(out), np.diag(rho), atol=0)
    for i in range(3):
        for j in range(3):
            want = rho[i, j] * off_diagonal_damping(w[i] - w[j], 1e17)
            assert out[i, j] == pytest.approx(want, rel=1e-12)
    with pytest.raises(ValueError):
        damp_off_diagonals(rho, w[:2], 1e17)
