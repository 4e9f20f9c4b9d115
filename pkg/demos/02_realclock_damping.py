"""
Reading the experiment off a physical clock
===========================================

Any real clock is itself a quantum system, so the time it reports
carries an irreducible phase diffusion theta ~ t_P^(4/3) T^(2/3).
Energy-basis coherences are then damped by exp(-omega^2 * theta)-type
factors.  For the global flip-all-spins observable <M> the damping
exponents add up over the N environment spins into a total K, and the
surviving signal is e^-K.
"""

import math

from spinchamber import (
    ClockParams,
    ExperimentConfig,
    QubitState,
    damping_exponent,
    damping_exponent_lower_bound,
    off_diagonal_damping,
    x_string_expectation_realclock,
    x_string_expectation_realclock_log,
    x_string_expectation_unitary,
)

ISQ2 = 1.0 / math.sqrt(2.0)
plus = QubitState(ISQ2, ISQ2)


def chain(n, omega1=3.0e10, tau=1e-6):
    # Uniform couplings, balanced spins: the closed forms stay simple.
    return ExperimentConfig.from_frequencies(
        plus, [plus] * n, f=1.0e4, omega1=omega1, omega2=0.4 * omega1,
        tau=tau, T_total=n * tau,
    )


print("=== ideal vs real clock, small chain ===")
cfg = chain(4)
ideal = x_string_expectation_unitary(cfg)
real = x_string_expectation_realclock(cfg, ClockParams.for_config(cfg))
print(f"<M> with an ideal clock : {ideal:+.12f}")
print(f"<M> with a real clock   : {real:+.12f}")
print(f"K for this chain        : {damping_exponent(cfg):.3e}  (harmless here)")

print()
print("=== growth of the damping exponent K with N ===")
print("per-spin exponent is fixed, so K is linear in N -- but the")
print("measurement floor only decays like a power of the tilt angle,")
print("so e^-K loses eventually.")
print(f"{'N':>10} {'K':>12} {'e^-K (log10)':>14}")
per_spin = damping_exponent(chain(2)) / 2  # K is additive over spins
for n in (10, 10**3, 10**6, 10**9, 10**12):
    k = per_spin * n
    print(f"{n:>10.0e} {k:>12.3e} {-k * math.log10(math.e):>14.3e}")

print()
print("=== device-independent lower bound on K ===")
print("dipole-coupled spins a distance d apart need a flight window")
print("tau >~ 1/f, which ties tau to d^3; optimising away the geometry")
print("leaves a bound growing like N^5.")
elec = ExperimentConfig(
    central=QubitState(ISQ2, ISQ2),
    env=(),
    B=1.0,
    gamma1=9.2740100783e-24,
    gamma2=9.2740100783e-24,
    tau=1e-6,
    T_total=1e-6,
    m=9.1093837015e-31,
    d=1e-9,
)
for n in (1, 10**3, 10**6, 10**7):
    lb = damping_exponent_lower_bound(elec, n)
    print(f"  N = {n:>9,}: K >= 10^{lb.log10_mag:+.2f}")

print()
print("=== deep damping handled in the log domain ===")
big = chain(3, omega1=1.0e30, tau=1.0)
clock = ClockParams.for_flight_time(1.0, 3.0)
as_float = x_string_expectation_realclock(big, clock)
as_log = x_string_expectation_realclock_log(big, clock)
print(f"float result underflows to   : {as_float!r}")
print(f"log-domain magnitude log10   : {as_log.log10_mag:.6g}")

print()
print("=== the same damping on a macroscopic superposition ===")
# Energy gap of a milligram lifted by a millimetre, ~1e-8 J.
omega_gap = 1.0e26  # rad/s
for t, label in ((3.6e3, "1 hour"), (3.16e7, "1 year"), (3.16e9, "1 century"),
                 (3.16e11, "10^4 years")):
    print(
        f"  gap 1e26 rad/s, T = {label:>10}:"
        f" suppression {off_diagonal_damping(omega_gap, t):.3e}"
    )
