"""Closed-form branch states, decoherence factors and X-string signals.

In the weak-coupling regime (per-spin coupling much smaller than the
Zeeman detuning) the sequentially evolved state stays a superposition of
two product branches labelled by the central spin.  In the rotating frame
that drops Zeeman phases, each environment spin in the central-up branch
acquires phases ``exp(-i f_k tau)`` / ``exp(+i f_k tau)`` on its up/down
amplitudes, and the opposite phases in the central-down branch.  (The sign
follows from evolving with exp(-i H tau); see the dephasing-mode identity
tests, where these phases are exact rather than approximate.)

Tracing out the environment leaves the central off-diagonal multiplied by
the decoherence factor

    z = prod_k [ cos(2 f_k tau) - i (|alpha_k|^2 - |beta_k|^2) sin(2 f_k tau) ]

whose magnitude never exceeds 1.  This module also evaluates the X-string
expectation in two closed forms: an ideal-clock per-spin-phase form, and a
"real clock" form in which timekeeping at finite resolution damps
off-diagonal terms through the per-window phase-diffusion parameter

    theta = (3/2) * t_P**(4/3) * tau**(2/3)      (t_P = Planck time).

The generic damping law for an energy gap omega over a duration T,
``exp(-(2/3) omega^2 t_P^(4/3) T^(2/3))``, is exposed separately; note the
spin-chain forms accumulate damping per flight window (linearly in N via
theta) rather than applying this law to the total duration.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .config import ExperimentConfig, QubitState
from .constants import CODATA2018, PhysicalConstants
from .density import DensityMatrix2
from .exact import CapExceededError, DEFAULT_ENV_CAP, StateVector
from .logmag import LogMagnitude

__all__ = [
    "WeakCouplingWarning",
    "ClockParams",
    "BranchState",
    "weak_coupling_branches",
    "decoherence_factor",
    "reduced_density_matrix",
    "x_string_expectation_unitary",
    "x_string_expectation_realclock",
    "x_string_expectation_realclock_log",
    "off_diagonal_damping",
    "damp_off_diagonals",
]

#: Coupling-to-detuning ratio above which the branch form is dubious.
WEAK_COUPLING_RATIO = 0.1


class WeakCouplingWarning(UserWarning):
    """The branch-state closed forms are being used outside their regime."""


@dataclass(frozen=True)
class ClockParams:
    """Real-clock parameters.

    Parameters
    ----------
    theta:
        Per-window phase-diffusion parameter in s^2 (0 = ideal clock).
    T_exp:
        Total duration entering the accumulated precession phase, seconds.
    """

    theta: float
    T_exp: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "T_exp", float(self.T_exp))
        if not (self.theta >= 0.0 and math.isfinite(self.theta)):
            raise ValueError(f"theta must be non-negative and finite, got {self.theta!r}")
        if not (self.T_exp >= 0.0 and math.isfinite(self.T_exp)):
            raise ValueError(f"T_exp must be non-negative and finite, got {self.T_exp!r}")

    @classmethod
    def for_flight_time(
        cls,
        tau: float,
        T_exp: float,
        constants: PhysicalConstants = CODATA2018,
    ) -> "ClockParams":
        """Clock with theta = (3/2) t_P^(4/3) tau^(2/3)."""
        if not (tau > 0.0):
            raise ValueError(f"tau must be positive, got {tau!r}")
        theta = 1.5 * constants.planck_time ** (4.0 / 3.0) * tau ** (2.0 / 3.0)
        return cls(theta=theta, T_exp=T_exp)

    @classmethod
    def for_config(
        cls, cfg: ExperimentConfig, constants: PhysicalConstants = CODATA2018
    ) -> "ClockParams":
        """Standard clock for a config: theta from tau, T_exp = T_total."""
        return cls.for_flight_time(cfg.tau, cfg.T_total, constants)

    @classmethod
    def ideal(cls, T_exp: float = 0.0) -> "ClockParams":
        return cls(theta=0.0, T_exp=T_exp)


@dataclass(frozen=True)
class BranchState:
    """Two-branch product form of the weakly coupled final state.

    The full state is ``up_amp |up> x (env_up products) + down_amp |down> x
    (env_down products)``, with the per-spin branch phases already folded
    into the environment states.
    """

    up_amp: complex
    down_amp: complex
    env_up: Tuple[QubitState, ...]
    env_down: Tuple[QubitState, ...]

    @property
    def n_env(self) -> int:
        return len(self.env_up)

    def to_state_vector(self, n_cap: int = DEFAULT_ENV_CAP) -> StateVector:
        """Re-expand the branch form as a dense state vector."""
        if self.n_env > n_cap:
            raise CapExceededError(
                f"n_env = {self.n_env} exceeds the dense-expansion cap of {n_cap}; "
                f"pass n_cap={self.n_env} to override"
            )
        up = StateVector.product(QubitState(1.0, 0.0), self.env_up).amps
        down = StateVector.product(QubitState(0.0, 1.0), self.env_down).amps
        return StateVector(
            amps=self.up_amp * up + self.down_amp * down, n_env=self.n_env
        )


def _check_weak_coupling(cfg: ExperimentConfig, constants: PhysicalConstants) -> None:
    om_diff = abs(cfg.omega_diff(constants))
    f_max = max((abs(f) for f in cfg.couplings), default=0.0)
    if f_max == 0.0:
        return
    if om_diff == 0.0 or f_max / om_diff > WEAK_COUPLING_RATIO:
        ratio = "inf" if om_diff == 0.0 else f"{f_max / om_diff:.3g}"
        warnings.warn(
            f"coupling/detuning ratio {ratio} exceeds {WEAK_COUPLING_RATIO}; "
            "branch-state closed forms are unreliable here",
            WeakCouplingWarning,
            stacklevel=3,
        )


def weak_coupling_branches(
    cfg: ExperimentConfig, constants: PhysicalConstants = CODATA2018
) -> BranchState:
    """Branch form of the state after all N flight windows.

    In the central-up branch, spin k becomes ``(alpha_k e^{-i f_k tau},
    beta_k e^{+i f_k tau})``; the central-down branch carries the conjugate
    phases.  Emits :class:`WeakCouplingWarning` when any coupling is not
    small against the Zeeman detuning.
    """
    _check_weak_coupling(cfg, constants)
    env_up = []
    env_down = []
    for spin in cfg.env:
        phase = cmath.exp(-1j * spin.f * cfg.tau)
        env_up.append(QubitState(spin.state.up * phase,
                                 spin.state.down * phase.conjugate()))
        env_down.append(QubitState(spin.state.up * phase.conjugate(),
                                   spin.state.down * phase))
    return BranchState(
        up_amp=cfg.central.up,
        down_amp=cfg.central.down,
        env_up=tuple(env_up),
        env_down=tuple(env_down),
    )


def _factor(spin_state: QubitState, f: float, tau: float) -> complex:
    """Single-spin overlap <chi_down|chi_up> of the two branch states."""
    angle = 2.0 * f * tau
    dp = spin_state.population_difference
    return complex(math.cos(angle), -dp * math.sin(angle))


def decoherence_factor(cfg: ExperimentConfig) -> complex:
    """Product of per-spin branch overlaps multiplying the coherence.

    Equals 1 for an empty environment; each factor has magnitude <= 1, so
    |z| is non-increasing as spins are appended.
    """
    z = complex(1.0, 0.0)
    for spin in cfg.env:
        z *= _factor(spin.state, spin.f, cfg.tau)
    return z


def reduced_density_matrix(cfg: ExperimentConfig) -> DensityMatrix2:
    """Central-spin density matrix in the branch form.

    Populations are untouched; the coherence is multiplied by the
    decoherence factor.
    """
    a, b = cfg.central.up, cfg.central.down
    z = decoherence_factor(cfg)
    off = a * b.conjugate() * z
    rho = np.array(
        [[abs(a) ** 2, off], [off.conjugate(), abs(b) ** 2]], dtype=complex
    )
    return DensityMatrix2(rho)


def x_string_expectation_unitary(
    cfg: ExperimentConfig, constants: PhysicalConstants = CODATA2018
) -> float:
    """Ideal-clock X-string expectation with per-spin pair phases.

    Evaluates ``a b* prod_k (alpha_k beta_k* + alpha_k* beta_k)
    e^{-2 i Omega_k tau} + c.c.`` with the per-pair frequency
    ``Omega_k = sqrt(4 f_k^2 + omega_diff^2)``.  For an empty environment
    the product (including its phases) is empty and the result is
    ``2 Re(a b*)``.  This single-phase form tracks the exact engine when
    the environment Zeeman precession is negligible (gamma2*B ~ 0).
    """
    om_diff = cfg.omega_diff(constants)
    coeff = 1.0
    phase_sum = 0.0
    for spin in cfg.env:
        coeff *= spin.state.x_overlap
        phase_sum += 2.0 * math.sqrt(4.0 * spin.f**2 + om_diff**2) * cfg.tau
    val = cfg.central.coherence * coeff * cmath.exp(-1j * phase_sum)
    return 2.0 * val.real


def _uniform_coupling(cfg: ExperimentConfig) -> None:
    fs = cfg.couplings
    if fs and (max(fs) - min(fs)) > 1e-12 * max(1.0, abs(max(fs, key=abs))):
        raise ValueError(
            "the uniform-phase (real-clock) form requires identical couplings "
            f"f_k; got range [{min(fs)!r}, {max(fs)!r}]"
        )


def _realclock_terms(
    cfg: ExperimentConfig, clock: ClockParams, constants: PhysicalConstants
):
    """Shared pieces of the real-clock X-string expectation.

    Returns (prefactor coherence a b*, total phase, damping exponent in
    nats, per-spin factors u_k x + conj(u_k)) where x damps the
    co-rotating part of each environment factor.
    """
    _uniform_coupling(cfg)
    n = cfg.n_env
    om_diff = cfg.omega_diff(constants)
    om_prod = cfg.omega_central(constants) * cfg.omega_env(constants)
    damp_nats = 4.0 * n * om_diff**2 * clock.theta
    x_exp = 16.0 * om_prod * clock.theta
    x = math.exp(-x_exp) if x_exp < 745.0 else 0.0
    factors = []
    for spin in cfg.env:
        u = spin.state.coherence
        factors.append(u * x + u.conjugate())
    phase = 2.0 * n * om_diff * clock.T_exp
    return cfg.central.coherence, phase, damp_nats, factors


def x_string_expectation_realclock(
    cfg: ExperimentConfig,
    clock: ClockParams,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """Real-clock X-string expectation (uniform-coupling form), as a float.

    Evaluates ``2 Re[ a b* e^{-2 i N Omega T} e^{-4 N Omega^2 theta}
    prod_k (alpha_k beta_k* e^{-16 omega1 omega2 theta} + alpha_k* beta_k) ]``
    with ``Omega`` the Zeeman detuning.  With ``theta = 0`` this reduces to
    the ideal-clock uniform-phase expectation; the result underflows to 0.0
    once the damping exponent is large (use the ``_log`` variant then).
    """
    ab, phase, damp_nats, factors = _realclock_terms(cfg, clock, constants)
    t1 = ab * cmath.exp(-1j * phase)
    t1 *= math.exp(-damp_nats) if damp_nats < 745.0 else 0.0
    for g in factors:
        t1 *= g
    return 2.0 * t1.real


def x_string_expectation_realclock_log(
    cfg: ExperimentConfig,
    clock: ClockParams,
    constants: PhysicalConstants = CODATA2018,
) -> LogMagnitude:
    """Real-clock X-string expectation as a signed log10 magnitude.

    Identical to :func:`x_string_expectation_realclock` but assembled in
    the log10 domain, so damping exponents far beyond float underflow are
    still meaningful.
    """
    ab, phase, damp_nats, factors = _realclock_terms(cfg, clock, constants)
    if abs(ab) == 0.0 or any(abs(g) == 0.0 for g in factors):
        return LogMagnitude.zero()
    log10_mag = (
        math.log10(2.0)
        + math.log10(abs(ab))
        - damp_nats * math.log10(math.e)
        + sum(math.log10(abs(g)) for g in factors)
    )
    psi = cmath.phase(ab) - phase + sum(cmath.phase(g) for g in factors)
    c = math.cos(psi)
    if c == 0.0:
        return LogMagnitude.zero()
    return LogMagnitude(1 if c > 0 else -1, log10_mag + math.log10(abs(c)))


def off_diagonal_damping(
    omega_nm: float, T: float, constants: PhysicalConstants = CODATA2018
) -> float:
    """Real-clock suppression of a coherence at energy gap ``omega_nm``.

    Returns ``exp(-(2/3) omega_nm^2 t_P^(4/3) T^(2/3))`` for a gap in
    rad/s over a duration T in seconds; dimensionless, in (0, 1] except
    for extreme arguments where the float result underflows to 0.0.
    """
    if T < 0.0 or not math.isfinite(T):
        raise ValueError(f"duration T must be non-negative and finite, got {T!r}")
    if not math.isfinite(omega_nm):
        raise ValueError(f"omega_nm must be finite, got {omega_nm!r}")
    expo = (2.0 / 3.0) * omega_nm**2 * constants.planck_time ** (4.0 / 3.0) * T ** (2.0 / 3.0)
    return math.exp(-expo) if expo < 745.0 else 0.0


def damp_off_diagonals(
    rho: np.ndarray,
    energies: np.ndarray,
    T: float,
    constants: PhysicalConstants = CODATA2018,
) -> np.ndarray:
    """Apply the real-clock damping elementwise in an energy eigenbasis.

    ``energies[n]`` are eigenfrequencies in rad/s; entry (n, m) of ``rho``
    is multiplied by the damping factor for the gap ``energies[n] -
    energies[m]``.  Diagonals are untouched (zero gap).
    """
    rho = np.asarray(rho, dtype=complex)
    w = np.asarray(energies, dtype=float)
    if rho.shape != (w.size, w.size):
        raise ValueError("rho must be square with one energy per row")
    gaps = w[:, None] - w[None, :]
    factors = np.vectorize(lambda g: off_diagonal_damping(g, T, constants))(gaps)
    return rho * factors
