"""Device-level limits on angle resolution and their effect on readout.

A measuring device of mass M, size R and operating time tau cannot define
a direction perfectly: quantum dispersion alone gives an angle uncertainty
of order ``sqrt(hbar tau / M) / R``.  Insisting that the device is causally
connected (R <= c tau) and not a black hole (R >= 2GM/c^2) degrades this
floor down the chain

    sqrt(hbar tau / M) / R   >=   sqrt(hbar / (c M R))   >=   l_P / R,

so even a device the size of the observable universe cannot resolve angles
below ~1e-62 rad.  The rest of the module propagates such an angle error
``dtheta`` through the spin-chain observables: misaligned analysers turn
the X string into a tilted string whose expectation acquires error terms
of order dtheta^N (population imbalances), dtheta^(2N) (after optimal
state preparation) plus a combinatorial budget of cross terms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .analytic import ClockParams, decoherence_factor, x_string_expectation_realclock_log
from .config import ExperimentConfig, QubitState
from .constants import CODATA2018, PhysicalConstants
from .exact import PAULI_X, PAULI_Y, PAULI_Z
from .logmag import LogMagnitude, log_exp_neg, log_pow, log_sum

__all__ = [
    "MeasuringDevice",
    "AngleBoundReport",
    "angle_resolution_floor",
    "tilted_spin_operator",
    "prepared_state",
    "cross_term_budget",
    "ErrorBudget",
    "XStringMeasurement",
    "x_string_measurement",
    "SxMeasurement",
    "sx_measurement",
]

#: dtheta above which the first-order preparation expansion is suspect.
_PREP_WARN = 0.1


@dataclass(frozen=True)
class MeasuringDevice:
    """Macroscopic measuring apparatus: mass (kg), radius (m), duration (s)."""

    mass: float
    radius: float
    duration: float

    def __post_init__(self) -> None:
        for name in ("mass", "radius", "duration"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class AngleBoundReport:
    """Angle-resolution floors for one device, radians.

    ``bound_quantum`` always applies; ``bound_sr`` / ``bound_gr`` apply
    when the corresponding consistency flag holds (device inside its light
    cone, device outside its Schwarzschild radius).  ``binding`` is the
    largest applicable floor.  All values are raw order-of-magnitude
    formulas with coefficient 1.
    """

    device: MeasuringDevice
    bound_quantum: float
    bound_sr: float
    bound_gr: float
    sr_consistent: bool
    gr_consistent: bool
    binding: float


def angle_resolution_floor(
    device: MeasuringDevice, constants: PhysicalConstants = CODATA2018
) -> AngleBoundReport:
    """Evaluate the three angle floors and pick the binding one."""
    hbar, c, G = constants.hbar, constants.c, constants.G
    m, r, t = device.mass, device.radius, device.duration
    bound_quantum = math.sqrt(hbar * t / m) / r
    bound_sr = math.sqrt(hbar / (c * m * r))
    bound_gr = constants.planck_length / r
    sr_consistent = r <= c * t
    gr_consistent = r >= 2.0 * G * m / c**2
    applicable = [bound_quantum]
    if sr_consistent:
        applicable.append(bound_sr)
    if gr_consistent:
        applicable.append(bound_gr)
    return AngleBoundReport(
        device=device,
        bound_quantum=bound_quantum,
        bound_sr=bound_sr,
        bound_gr=bound_gr,
        sr_consistent=sr_consistent,
        gr_consistent=gr_consistent,
        binding=max(applicable),
    )


def tilted_spin_operator(
    axis: str, dtheta: float, first_order: bool = False
) -> np.ndarray:
    """Pauli operator along an axis tilted by ``dtheta`` radians.

    The tilt stays in the x-z plane for axes ``"x"`` and ``"z"`` (x tilts
    toward z and vice versa) and in the y-z plane for axis ``"y"``.  Exact
    trigonometry by default; ``first_order`` gives the linearised operator
    (e.g. ``sx + dtheta*sz``), which is no longer unit-normalised.

    ``|dtheta|`` may not exceed pi/2.
    """
    dtheta = float(dtheta)
    if not (abs(dtheta) <= math.pi / 2.0):
        raise ValueError(f"|dtheta| must be <= pi/2, got {dtheta!r}")
    if first_order:
        c, s = 1.0, dtheta
    else:
        c, s = math.cos(dtheta), math.sin(dtheta)
    if axis == "z":
        return s * PAULI_X + c * PAULI_Z
    if axis == "x":
        return c * PAULI_X + s * PAULI_Z
    if axis == "y":
        return c * PAULI_Y + s * PAULI_Z
    raise ValueError(f"axis must be 'x', 'y' or 'z', got {axis!r}")


def prepared_state(intended: QubitState, dtheta: float) -> QubitState:
    """State actually prepared by an analyser misaligned by ``dtheta``.

    First-order rotation of the intended amplitudes,
    ``(alpha - dtheta/2 * beta, beta + dtheta/2 * alpha)``, renormalised.
    Returns the input unchanged at ``dtheta = 0``; warns when ``|dtheta|``
    is large enough (> 0.1) that dropping the second-order terms is
    doubtful.
    """
    dtheta = float(dtheta)
    if not math.isfinite(dtheta):
        raise ValueError(f"dtheta must be finite, got {dtheta!r}")
    if dtheta == 0.0:
        return intended
    if abs(dtheta) > _PREP_WARN:
        warnings.warn(
            f"|dtheta| = {abs(dtheta):.3g} is beyond the first-order "
            "preparation regime",
            UserWarning,
            stacklevel=2,
        )
    half = 0.5 * dtheta
    return QubitState.renormalize(
        intended.up - half * intended.down,
        intended.down + half * intended.up,
    )


def cross_term_budget(n_env: int, dtheta: float) -> LogMagnitude:
    """Worst-case size of the mixed tilt terms in the X-string readout.

    Upper-bounds the sum over strings with 1..N analysers flipped to their
    tilt component, ``sum_{n=1}^{N} C(N+1, n) dtheta^n``, bounding every
    operator expectation by 1.  Uses the closed form
    ``(1+dtheta)^(N+1) - 1 - dtheta^(N+1)`` evaluated stably in the log
    domain, so it is exact for N = 0 (empty sum) and finite for any N.
    """
    if n_env < 0:
        raise ValueError(f"n_env must be non-negative, got {n_env!r}")
    dtheta = float(dtheta)
    if not (dtheta >= 0.0 and math.isfinite(dtheta)):
        raise ValueError(f"dtheta must be non-negative and finite, got {dtheta!r}")
    if n_env == 0 or dtheta == 0.0:
        return LogMagnitude.zero()
    y = (n_env + 1) * math.log1p(dtheta)
    if y > 500.0:
        # (1+dtheta)^(N+1) dwarfs the two subtracted terms.
        return LogMagnitude(1, y * math.log10(math.e))
    total = math.expm1(y)
    top_exp = (n_env + 1) * math.log(dtheta) if dtheta > 0 else -math.inf
    top = math.exp(top_exp) if top_exp > -745.0 else 0.0
    return LogMagnitude.from_float(total - top)


@dataclass(frozen=True)
class ErrorBudget:
    """Systematic error terms of the tilted X-string readout.

    ``leading``: the dtheta^N term with preparation-corrected population
    factors ``(|alpha|^2 - |beta|^2 + dtheta(alpha beta* + alpha* beta))``
    per spin (signed).  ``preparation_corrected``: what that term becomes
    when every environment population difference is tuned to zero, i.e. the
    dtheta^(2N) floor (magnitude).  ``cross_terms``: worst-case bound on
    all remaining mixed terms.  ``all_z_term``: the alternative
    operator-expansion bookkeeping in which the fully tilted string
    contributes at order dtheta^(N+1) with uncorrected populations; kept
    separately labelled, the ``leading`` form drives comparisons.
    """

    leading: LogMagnitude
    preparation_corrected: LogMagnitude
    cross_terms: LogMagnitude
    all_z_term: LogMagnitude


@dataclass(frozen=True)
class XStringMeasurement:
    """Tilted X-string readout: central value, damping envelope, errors.

    ``central`` is the real-clock expectation of the untampered X string
    (signed, log domain); ``envelope`` is its damping magnitude e^{-K}
    alone, with K the accumulated real-clock exponent; ``budget`` collects
    the tilt-induced systematic terms.
    """

    central: LogMagnitude
    envelope: LogMagnitude
    budget: ErrorBudget


def _population_factor(state: QubitState, dtheta: float) -> float:
    return state.population_difference + dtheta * state.x_overlap


def x_string_measurement(
    cfg: ExperimentConfig,
    clock: ClockParams,
    dtheta: float,
    constants: PhysicalConstants = CODATA2018,
) -> XStringMeasurement:
    """Expectation of the X string measured with analysers tilted by dtheta.

    All magnitudes are returned in the log10 domain since the interesting
    regimes (K of order 10^2..10^8, dtheta down to 1e-62) are far outside
    float range.
    """
    dtheta = float(dtheta)
    if not (dtheta >= 0.0 and math.isfinite(dtheta)):
        raise ValueError(f"dtheta must be non-negative and finite, got {dtheta!r}")
    n = cfg.n_env
    om_diff = cfg.omega_diff(constants)
    k_exponent = 4.0 * n * om_diff**2 * clock.theta
    envelope = log_exp_neg(k_exponent)
    central = x_string_expectation_realclock_log(cfg, clock, constants)

    if dtheta == 0.0:
        zero = LogMagnitude.zero()
        budget = ErrorBudget(zero, zero, zero, zero)
        return XStringMeasurement(central=central, envelope=envelope, budget=budget)

    dtheta_pow_n = log_pow(dtheta, n) if n else LogMagnitude.one()
    central_factor = LogMagnitude.from_float(_population_factor(cfg.central, dtheta))
    leading = dtheta_pow_n * central_factor
    prep = log_pow(dtheta, 2 * n) if n else LogMagnitude.one()
    prep = prep * abs(central_factor)
    all_z = log_pow(dtheta, n + 1) * LogMagnitude.from_float(
        cfg.central.population_difference
    )
    for spin in cfg.env:
        leading = leading * LogMagnitude.from_float(
            _population_factor(spin.state, dtheta)
        )
        prep = prep * LogMagnitude.from_float(abs(spin.state.x_overlap))
        all_z = all_z * LogMagnitude.from_float(spin.state.population_difference)
    budget = ErrorBudget(
        leading=leading,
        preparation_corrected=prep,
        cross_terms=cross_term_budget(n, dtheta),
        all_z_term=all_z,
    )
    return XStringMeasurement(central=central, envelope=envelope, budget=budget)


@dataclass(frozen=True)
class SxMeasurement:
    """Central-spin sx readout under a tilt: total and its decomposition."""

    value: float
    coherence_part: float
    error_part: float
    decoherence_factor: complex


def sx_measurement(
    cfg: ExperimentConfig, dtheta: float
) -> SxMeasurement:
    """Expectation of the tilted central-spin sx after decoherence.

    The coherence part is the surviving off-diagonal signal,
    ``2 Re[(a - dtheta/2 b)(b + dtheta/2 a)* z]`` with z the decoherence
    factor; the error part is the tilt leakage of the populations,
    ``dtheta (|a|^2 - |b|^2 + dtheta (a b* + a* b))``.
    """
    dtheta = float(dtheta)
    if not (dtheta >= 0.0 and math.isfinite(dtheta)):
        raise ValueError(f"dtheta must be non-negative and finite, got {dtheta!r}")
    z = decoherence_factor(cfg)
    prep = prepared_state(cfg.central, dtheta)
    coherence = 2.0 * (prep.coherence * z).real
    error = dtheta * _population_factor(cfg.central, dtheta)
    return SxMeasurement(
        value=coherence + error,
        coherence_part=coherence,
        error_part=error,
        decoherence_factor=z,
    )
