"""Feasibility screening, damping exponents and the verdict machinery."""

import math

import numpy as np
import pytest

from spinchamber import (
    CODATA2018,
    ClockParams,
    EnvSpin,
    ExperimentConfig,
    LogMagnitude,
    QubitState,
    damping_exponent,
    damping_exponent_lower_bound,
    decide,
    decide_local,
    dipolar_coupling_rate,
    feasibility_check,
    undecidability_crossover,
)
from spinchamber.verdict import _first_true

from conftest import random_config

INV_SQRT2 = 1.0 / math.sqrt(2.0)
MU_B = 9.2740100783e-24  # Bohr magneton, J/T
M_E = 9.1093837015e-31  # electron mass, kg


def _si_cfg(n_env=1, B=1.0, gamma1=MU_B, gamma2=0.5 * MU_B, tau=1e-6, d=1e-9,
            m=M_E, f=1e3, T_total=None):
    plus = QubitState(INV_SQRT2, INV_SQRT2)
    env = tuple(EnvSpin(plus, f) for _ in range(n_env))
    if T_total is None:
        T_total = max(n_env, 1) * tau
    return ExperimentConfig(
        central=plus, env=env, B=B, gamma1=gamma1, gamma2=gamma2,
        tau=tau, T_total=T_total, m=m, d=d,
    )


# -- feasibility -----------------------------------------------------------


def test_dipolar_rate_frozen():
    cfg = _si_cfg(gamma1=MU_B, gamma2=MU_B, d=1e-9)
    # Two Bohr magnetons a nanometre apart.
    assert dipolar_coupling_rate(cfg) == pytest.approx(1024870117.6163334, rel=1e-10)


def test_feasibility_report_structure():
    cfg = _si_cfg(tau=1e-6)
    rep = feasibility_check(cfg)
    names = [c.name for c in rep.conditions]
    assert names == ["coupling", "dispersion", "weakness", "damping"]
    assert rep.damping.passed is None
    assert rep.damping.value == pytest.approx(damping_exponent(cfg))
    assert set(rep.margins) == {"coupling", "dispersion", "weakness"}


def test_feasibility_coupling_condition():
    # f*tau = 1024.87 for a 1 us flight at 1 nm: passes.
    cfg = _si_cfg(gamma1=MU_B, gamma2=MU_B, tau=1e-6)
    rep = feasibility_check(cfg)
    assert rep.coupling.passed
    assert rep.coupling.value == pytest.approx(1.0248701176163334e3, rel=1e-10)
    assert rep.coupling.margin_log10 == pytest.approx(3.0, abs=0.1)
    # A much shorter flight fails the same condition.
    rep2 = feasibility_check(_si_cfg(gamma1=MU_B, gamma2=MU_B, tau=1e-10))
    assert not rep2.coupling.passed
    assert rep2.coupling.margin_log10 < 0


def test_feasibility_dispersion_condition():
    # Free-particle spread sqrt(hbar T / m) against the working distance.
    cfg = _si_cfg(tau=1e-9, T_total=1e-9)
    spread = math.sqrt(CODATA2018.hbar * 1e-9 / M_E)
    rep = feasibility_check(cfg)
    assert rep.dispersion.value == pytest.approx(spread, rel=1e-12)
    assert rep.dispersion.passed == (spread <= cfg.d)
    # A custom reference distance overrides cfg.d.
    rep2 = feasibility_check(cfg, dispersion_reference=10.0)
    assert rep2.dispersion.passed


def test_feasibility_weakness_condition():
    # gamma2 = gamma1/2 gives a huge detuning; dipolar f is tiny vs it.
    cfg = _si_cfg()
    rep = feasibility_check(cfg)
    assert rep.weakness.passed
    # Degenerate moments: zero detuning, infinite ratio, hard fail.
    cfg2 = _si_cfg(gamma1=MU_B, gamma2=MU_B)
    rep2 = feasibility_check(cfg2)
    assert not rep2.weakness.passed
    assert rep2.weakness.value == math.inf
    assert rep2.weakness.margin_log10 == -math.inf
    # Tightening the threshold flips a passing config.
    ratio = rep.weakness.value
    rep3 = feasibility_check(cfg, ratio_threshold=ratio / 2)
    assert not rep3.weakness.passed


def test_feasibility_all_passed():
    good = _si_cfg(tau=1e-6)
    assert feasibility_check(good).all_passed == (
        feasibility_check(good).coupling.passed
        and feasibility_check(good).dispersion.passed
        and feasibility_check(good).weakness.passed
    )


# -- damping exponents -----------------------------------------------------


def test_damping_exponent_frozen(rng):
    # N = 10, detuning 1e15 rad/s, tau = 1 s.
    cfg = random_config(rng, 10, f_scale=1.0, omega1=1e15, omega2=0.0, tau=1.0)
    assert damping_exponent(cfg) == pytest.approx(1.2219970672077369e-26, rel=1e-12)


def test_damping_exponent_scalings(rng):
    base = random_config(rng, 2, omega1=5e14, tau=1.0)
    # Linear in N.
    more = random_config(rng, 4, omega1=5e14, tau=1.0)
    assert damping_exponent(more) / damping_exponent(base) == pytest.approx(2.0)
    # Quadratic in the detuning.
    hot = random_config(rng, 2, omega1=1e15, tau=1.0)
    assert damping_exponent(hot) / damping_exponent(base) == pytest.approx(4.0)
    # tau^(2/3).
    slow = random_config(rng, 2, omega1=5e14, tau=8.0)
    assert damping_exponent(slow) / damping_exponent(base) == pytest.approx(4.0)


def test_damping_lower_bound_frozen():
    # Electron mass and Bohr magnetons: the N = 1 bound constant.
    cfg = _si_cfg(gamma1=MU_B, gamma2=MU_B)
    lm = damping_exponent_lower_bound(cfg)
    assert lm.sign == 1
    assert lm.log10_mag == pytest.approx(-25.465182640678011, abs=1e-9)
    assert lm.to_float() == pytest.approx(3.4262366733332323e-26, rel=1e-9)


def test_damping_lower_bound_n5_scaling():
    cfg = _si_cfg(gamma1=MU_B, gamma2=MU_B)
    one = damping_exponent_lower_bound(cfg, n_env=1)
    big = damping_exponent_lower_bound(cfg, n_env=2)
    assert big.log10_mag - one.log10_mag == pytest.approx(5 * math.log10(2.0))


def test_damping_lower_bound_edge_cases():
    cfg = _si_cfg(n_env=0)
    assert damping_exponent_lower_bound(cfg) == LogMagnitude.zero()
    with pytest.raises(ValueError):
        damping_exponent_lower_bound(_si_cfg(gamma2=-MU_B))
    with pytest.raises(ValueError):
        damping_exponent_lower_bound(cfg, n_env=-1)


# -- global verdict --------------------------------------------------------


def test_decide_frozen_undecidable_case(rng):
    # K = 300 damping against a dtheta = 1e-62 floor with one spin: the
    # signal (exp(-300) ~ 1e-130) sits 68.6 decades under the floor, which
    # is itself set by the cross-term budget 2*dtheta, not dtheta^2.
    cfg = random_config(rng, 1, f_scale=1.0, omega1=1.0, tau=1.0)
    clock = ClockParams(theta=75.0, T_exp=0.0)  # 4 * 1 * 1^2 * 75 = 300
    v = decide(cfg, clock, 1e-62)
    assert v.k_model == "direct"
    assert v.signal.log10_mag == pytest.approx(-130.28834457097555, abs=1e-10)
    assert v.preparation_floor.log10_mag == pytest.approx(-124.0, abs=1e-12)
    assert v.cross_terms.log10_mag == pytest.approx(-61.698970004336019, abs=1e-10)
    assert v.floor == v.cross_terms
    assert v.verdict == "Undecidable"
    assert v.margin_log10 == pytest.approx(68.589374566639529, abs=1e-9)


def test_decide_decidable_case(rng):
    # Tiny K: signal ~ 1 sits far above any floor.
    cfg = random_config(rng, 1, omega1=1.0, tau=1.0)
    v = decide(cfg, ClockParams(theta=1e-40, T_exp=0.0), 1e-10)
    assert v.verdict == "Decidable"
    assert v.margin_log10 < 0


def test_decide_default_clock_matches_config_exponent(rng):
    cfg = random_config(rng, 3, omega1=1e14, tau=1e-3)
    v = decide(cfg, None, 1e-30)
    k = damping_exponent(cfg)
    assert v.signal.log10_mag == pytest.approx(-k * math.log10(math.e), rel=1e-12)
    # The standard clock passed explicitly gives the identical verdict.
    v2 = decide(cfg, ClockParams.for_config(cfg), 1e-30)
    # 6 N w^2 tP^(4/3) tau^(2/3) vs 4 N w^2 * (1.5 tP^(4/3) tau^(2/3)):
    # same exponent up to operation order, so compare to rounding only.
    assert v2.signal.log10_mag == pytest.approx(v.signal.log10_mag, rel=1e-12)


def test_decide_empty_environment_ties(rng):
    # N = 0: no damping (signal 1) and the floor degenerates to 1; the tie
    # goes to Undecidable.
    cfg = random_config(rng, 0)
    v = decide(cfg, None, 1e-5)
    assert v.signal == LogMagnitude.one()
    assert v.floor == LogMagnitude.one()
    assert v.verdict == "Undecidable"
    assert v.margin_log10 == 0.0


def test_decide_bound_model():
    cfg = _si_cfg(gamma1=MU_B, gamma2=MU_B, n_env=2)
    v = decide(cfg, None, 1e-62, k_model="bound")
    assert v.k_model == "bound"
    k = 2**5 * 3.4262366733332323e-26
    assert v.signal.log10_mag == pytest.approx(-k * math.log10(math.e), rel=1e-9)
    with pytest.raises(ValueError):
        decide(cfg, None, 1e-62, k_model="exotic")
    with pytest.raises(ValueError):
        decide(_si_cfg(gamma2=-MU_B), None, 1e-62, k_model="bound")


def test_decide_dtheta_validation(rng):
    cfg = random_config(rng, 1)
    for bad in (0.0, -1e-5, math.inf):
        with pytest.raises(ValueError):
            decide(cfg, None, bad)


# -- local verdict ---------------------------------------------------------


def _balanced_cfg(n, f_tau=0.3):
    plus = QubitState(INV_SQRT2, INV_SQRT2)
    return ExperimentConfig.from_frequencies(
        plus, [plus] * n, f=f_tau, omega1=50.0, tau=1.0
    )


def test_decide_local_frozen_signal():
    # Balanced environment: per-spin factor |cos 0.6|, central overlap 1.
    v = decide_local(_balanced_cfg(20), 1e-2)
    assert v.signal.to_float() == pytest.approx(0.021508579253641206, rel=1e-10)


def test_decide_local_verdict_flip():
    # The same 20-spin config is decidable at dtheta = 0.01 but not at 0.2.
    assert decide_local(_balanced_cfg(20), 1e-2).verdict == "Decidable"
    with pytest.warns(UserWarning):  # 0.2 is beyond the first-order regime
        v = decide_local(_balanced_cfg(20), 0.2)
    assert v.verdict == "Undecidable"


def test_decide_local_floor_terms():
    # floor = dtheta^2 + dtheta * |prepared population imbalance|; for the
    # balanced central state the prepared imbalance is ~dtheta, so the
    # floor is ~2 dtheta^2.
    v = decide_local(_balanced_cfg(3), 1e-3)
    assert v.floor.to_float() == pytest.approx(2e-6, rel=1e-3)


def test_decide_local_deep_environment():
    # 10^4 spins push |z| to ~1e-1667: far out of float range, still exact
    # in the log domain.
    v = decide_local(_balanced_cfg(10_000), 1e-2)
    assert v.signal.log10_mag == pytest.approx(
        10_000 * math.log10(math.cos(0.6)), rel=1e-12
    )
    assert v.verdict == "Undecidable"


def test_decide_local_vanishing_signal():
    # f*tau = pi/4 makes cos(2 f tau) vanish (to float rounding, ~6e-17);
    # one balanced spin then kills the coherence below any realistic floor.
    v = decide_local(_balanced_cfg(1, f_tau=math.pi / 4), 1e-8)
    assert v.signal.log10_mag == pytest.approx(
        math.log10(abs(math.cos(math.pi / 2))), rel=1e-12
    )
    assert v.verdict == "Undecidable"  # floor ~2e-16 beats signal ~6e-17


def test_decide_local_polarised_central():
    # No central coherence: nothing to read out.
    up = QubitState(1.0, 0.0)
    cfg = ExperimentConfig.from_frequencies(up, [up], f=0.1, omega1=5.0)
    v = decide_local(cfg, 1e-4)
    assert v.signal == LogMagnitude.zero()
    assert v.verdict == "Undecidable"


# -- crossover scan --------------------------------------------------------


def test_first_true_bisection():
    assert _first_true(lambda n: n >= 7, 100) == 7
    assert _first_true(lambda n: n >= 1, 100) == 1
    assert _first_true(lambda n: n >= 100, 100) == 100
    assert _first_true(lambda n: False, 100) is None
    assert _first_true(lambda n: True, 100) == 1


def test_crossover_electron_frozen():
    # Electron-scale parameters, dtheta = 1e-62: the N^5 bound model says
    # the flip happens just shy of ten million spins.
    cfg = _si_cfg(gamma1=MU_B, gamma2=MU_B)
    res = undecidability_crossover(cfg, 1e-62, n_max=20_000_000)
    assert res.n_star_bound_model == 9554435
    # Closed-form inversion: smallest N with c N^5 ... >= 2 N ln(1/dtheta),
    # i.e. N^4 >= 2 ln(1/dtheta) / c.
    c = 3.4262366733332323e-26
    n_closed = math.ceil((2 * math.log(1e62) / c) ** 0.25)
    assert abs(res.n_star_bound_model - n_closed) <= 1


def test_crossover_direct_model_is_flat(rng):
    # The direct exponent and the floor are both linear in N, so the
    # verdict cannot flip with N: it is either already undecidable at
    # N = 1 or never.
    weak = random_config(rng, 1, omega1=1.0, omega2=0.25, tau=1.0)  # kappa ~ 1e-58
    res = undecidability_crossover(weak, 1e-10, 1000)
    assert res.n_star_direct_model is None
    strong = random_config(rng, 1, omega1=3e30, omega2=1e30, tau=1.0)  # kappa ~ 4900
    res2 = undecidability_crossover(strong, 1e-62, 1000)
    assert res2.n_star_direct_model == 1


def test_crossover_bound_model_undefined_without_env_moment(rng):
    # gamma2 = 0 leaves the N^5 bound undefined; the direct entry is still
    # reported.
    cfg = random_config(rng, 1, omega1=1.0, tau=1.0)  # omega2 defaults to 0
    res = undecidability_crossover(cfg, 1e-10, 100)
    assert res.n_star_bound_model is None
    assert res.n_star_direct_model is None


def test_crossover_bound_overflow_guard():
    # Parameters so extreme the bound exponent overflows 10^308 decades:
    # the signal is zero to any precision and the flip is immediate.
    cfg = _si_cfg(gamma1=1e-60, gamma2=1e-60, m=1e-60)
    res = undecidability_crossover(cfg, 1e-62, 10)
    assert res.n_star_bound_model == 1


def test_crossover_validation(rng):
    cfg = random_config(rng, 1)
    with pytest.raises(ValueError):
        undecidability_crossover(cfg, 0.0, 10)
    with pytest.raises(ValueError):
        undecidability_crossover(cfg, 1e-5, 0)
