"""Feasibility screening and distinguishability verdicts.

The question the package ultimately answers: can any physically realisable
experiment tell a unitarily evolving superposition from a collapsed
mixture?  The surviving global signal is the damped X-string expectation,
of order exp(-K) with

    K = 6 N [B(gamma1-gamma2)/hbar]^2 t_P^(4/3) tau^(2/3),

while the best achievable measurement floor is set by the angle resolution
dtheta: a dtheta^(2N) preparation floor plus a combinatorial cross-term
budget.  Both sides routinely live hundreds of decades below float range,
so every comparison here happens in the log10 domain.

Two growth models for K are exposed: the direct per-config exponent above
(linear in N) and a device-independent lower bound that grows like N^5,

    K  >=  N^5 t_P^(4/3) hbar^(20/3) / (m^4 (gamma1 gamma2)^(8/3) mu0^(8/3)).

Under the N^5 model the signal eventually drops below any dtheta^(2N)
floor, and :func:`undecidability_crossover` locates the first such N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .analytic import ClockParams, decoherence_factor
from .config import ExperimentConfig
from .constants import CODATA2018, PhysicalConstants
from .limits import cross_term_budget, prepared_state
from .logmag import LogMagnitude, log_exp_neg, log_pow, log_sum

__all__ = [
    "Condition",
    "FeasibilityReport",
    "feasibility_check",
    "damping_exponent",
    "damping_exponent_lower_bound",
    "UndecidabilityVerdict",
    "decide",
    "LocalVerdict",
    "decide_local",
    "CrossoverResult",
    "undecidability_crossover",
]

_LOG10_E = math.log10(math.e)

#: Default ceiling on the coupling/detuning ratio (feasibility condition c).
DEFAULT_RATIO_THRESHOLD = 0.1


@dataclass(frozen=True)
class Condition:
    """One feasibility condition: its value, threshold and log10 slack.

    ``passed`` is None for purely informational entries.  ``margin_log10``
    is positive when the condition passes with room to spare.
    """

    name: str
    value: float
    passed: Optional[bool]
    margin_log10: Optional[float]


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the pre-flight checks for one configuration.

    a) the spins actually couple during a flight window (f tau > 1, with f
       the dipolar rate mu0 gamma1 gamma2 / (hbar d^3));
    b) an environment wavepacket does not disperse beyond the working
       distance (sqrt(hbar T / m) <= d by default);
    c) the coupling stays weak against the Zeeman detuning
       (f / (B|gamma1-gamma2|/hbar) below a threshold);
    d) informational: the damping exponent K of the config.
    """

    coupling: Condition
    dispersion: Condition
    weakness: Condition
    damping: Condition

    @property
    def conditions(self) -> Tuple[Condition, ...]:
        return (self.coupling, self.dispersion, self.weakness, self.damping)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions if c.passed is not None)

    @property
    def margins(self) -> dict:
        return {
            c.name: c.margin_log10
            for c in self.conditions
            if c.margin_log10 is not None
        }


def dipolar_coupling_rate(
    cfg: ExperimentConfig, constants: PhysicalConstants = CODATA2018
) -> float:
    """Order-of-magnitude dipole-dipole rate mu0 gamma1 gamma2/(hbar d^3), rad/s."""
    return constants.mu0 * cfg.gamma1 * cfg.gamma2 / (constants.hbar * cfg.d**3)


def feasibility_check(
    cfg: ExperimentConfig,
    dispersion_reference: Optional[float] = None,
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD,
    constants: PhysicalConstants = CODATA2018,
) -> FeasibilityReport:
    """Screen a configuration against the conditions listed on the report.

    ``dispersion_reference`` defaults to the working distance ``cfg.d``;
    ``ratio_threshold`` is the ceiling for condition c.
    """
    f = dipolar_coupling_rate(cfg, constants)
    ftau = f * cfg.tau
    cond_a = Condition(
        name="coupling",
        value=ftau,
        passed=ftau > 1.0,
        margin_log10=math.log10(ftau) if ftau > 0 else -math.inf,
    )

    ref = cfg.d if dispersion_reference is None else float(dispersion_reference)
    spread = math.sqrt(constants.hbar * cfg.T_total / cfg.m)
    cond_b = Condition(
        name="dispersion",
        value=spread,
        passed=spread <= ref,
        margin_log10=math.log10(ref / spread) if spread > 0 else math.inf,
    )

    om_diff = abs(cfg.omega_diff(constants))
    ratio = abs(f) / om_diff if om_diff > 0 else math.inf
    cond_c = Condition(
        name="weakness",
        value=ratio,
        passed=ratio < ratio_threshold,
        margin_log10=(
            math.log10(ratio_threshold / ratio) if 0 < ratio < math.inf
            else (math.inf if ratio == 0.0 else -math.inf)
        ),
    )

    cond_d = Condition(
        name="damping",
        value=damping_exponent(cfg, constants),
        passed=None,
        margin_log10=None,
    )
    return FeasibilityReport(
        coupling=cond_a, dispersion=cond_b, weakness=cond_c, damping=cond_d
    )


def damping_exponent(
    cfg: ExperimentConfig, constants: PhysicalConstants = CODATA2018
) -> float:
    """Accumulated real-clock damping exponent K of a configuration.

    ``K = 6 N omega_diff^2 t_P^(4/3) tau^(2/3)``; the X-string coherence
    survives as exp(-K).
    """
    om_diff = cfg.omega_diff(constants)
    return (
        6.0
        * cfg.n_env
        * om_diff**2
        * constants.planck_time ** (4.0 / 3.0)
        * cfg.tau ** (2.0 / 3.0)
    )


def damping_exponent_lower_bound(
    cfg: ExperimentConfig,
    n_env: Optional[int] = None,
    constants: PhysicalConstants = CODATA2018,
) -> LogMagnitude:
    """Device-independent lower bound on K, growing as N^5.

    Evaluates ``N^5 t_P^(4/3) hbar^(20/3) / (m^4 (gamma1 gamma2)^(8/3)
    mu0^(8/3))`` in the log10 domain (the value spans hundreds of decades
    across physical parameter ranges).  ``n_env`` overrides the config's
    environment size, e.g. for scans.
    """
    n = cfg.n_env if n_env is None else int(n_env)
    if n < 0:
        raise ValueError(f"n_env must be non-negative, got {n!r}")
    if n == 0:
        return LogMagnitude.zero()
    gg = cfg.gamma1 * cfg.gamma2
    if not gg > 0.0:
        raise ValueError(
            "the N^5 bound needs gamma1*gamma2 > 0 (fractional power), got "
            f"{gg!r}"
        )
    log10 = (
        5.0 * math.log10(n)
        + (4.0 / 3.0) * math.log10(constants.planck_time)
        + (20.0 / 3.0) * math.log10(constants.hbar)
        - 4.0 * math.log10(cfg.m)
        - (8.0 / 3.0) * math.log10(gg)
        - (8.0 / 3.0) * math.log10(constants.mu0)
    )
    return LogMagnitude(1, log10)


@dataclass(frozen=True)
class UndecidabilityVerdict:
    """Log-domain comparison of the surviving signal against the floor.

    ``signal`` is exp(-K); ``floor`` is the larger of the dtheta^(2N)
    preparation floor and the cross-term budget (both are also reported).
    ``verdict`` is "Undecidable" when signal <= floor (ties included),
    else "Decidable"; ``margin_log10`` is floor minus signal in decades,
    positive for undecidable configurations.
    """

    signal: LogMagnitude
    floor: LogMagnitude
    preparation_floor: LogMagnitude
    cross_terms: LogMagnitude
    verdict: str
    margin_log10: float
    k_model: str


def _verdict_from_parts(
    signal: LogMagnitude,
    pow_floor: LogMagnitude,
    cross: LogMagnitude,
    k_model: str,
) -> UndecidabilityVerdict:
    floor = max(pow_floor, cross)
    undecidable = signal <= floor
    margin = floor.log10_mag - signal.log10_mag
    return UndecidabilityVerdict(
        signal=signal,
        floor=floor,
        preparation_floor=pow_floor,
        cross_terms=cross,
        verdict="Undecidable" if undecidable else "Decidable",
        margin_log10=margin,
        k_model=k_model,
    )


def decide(
    cfg: ExperimentConfig,
    clock: Optional[ClockParams],
    dtheta: float,
    k_model: str = "direct",
    constants: PhysicalConstants = CODATA2018,
) -> UndecidabilityVerdict:
    """Verdict on distinguishing unitary evolution from collapse globally.

    ``k_model`` selects how K is obtained: ``"direct"`` uses the
    per-config exponent (with a custom ``clock`` the equivalent form
    ``4 N omega_diff^2 theta``, which coincides with the standard exponent
    when theta derives from tau); ``"bound"`` uses the N^5 lower bound.
    ``dtheta`` must be positive; ties go to "Undecidable".
    """
    dtheta = float(dtheta)
    if not (dtheta > 0.0 and math.isfinite(dtheta)):
        raise ValueError(f"dtheta must be positive and finite, got {dtheta!r}")
    n = cfg.n_env
    if k_model == "direct":
        if clock is None:
            k = damping_exponent(cfg, constants)
        else:
            k = 4.0 * n * cfg.omega_diff(constants) ** 2 * clock.theta
        signal = log_exp_neg(k)
    elif k_model == "bound":
        k_lm = damping_exponent_lower_bound(cfg, constants=constants)
        if k_lm.sign == 0:
            signal = LogMagnitude.one()
        else:
            signal = LogMagnitude(1, -(10.0 ** k_lm.log10_mag) * _LOG10_E)
    else:
        raise ValueError(f"k_model must be 'direct' or 'bound', got {k_model!r}")
    pow_floor = log_pow(dtheta, 2 * n) if n else LogMagnitude.one()
    cross = cross_term_budget(n, dtheta)
    return _verdict_from_parts(signal, pow_floor, cross, k_model)


@dataclass(frozen=True)
class LocalVerdict:
    """Same comparison for the local (central-spin-only) readout.

    ``signal`` is the decohered coherence magnitude |z| |a b* + a* b|;
    ``floor`` is dtheta^2 plus dtheta times the residual population
    imbalance of the actually prepared central state.
    """

    signal: LogMagnitude
    floor: LogMagnitude
    verdict: str
    margin_log10: float


def decide_local(cfg: ExperimentConfig, dtheta: float) -> LocalVerdict:
    """Verdict on distinguishing collapse using only the central spin.

    Log-domain throughout, so environments large enough to push |z| under
    float range are handled.
    """
    dtheta = float(dtheta)
    if not (dtheta > 0.0 and math.isfinite(dtheta)):
        raise ValueError(f"dtheta must be positive and finite, got {dtheta!r}")
    log_z = 0.0
    vanished = False
    for spin in cfg.env:
        angle = 2.0 * spin.f * cfg.tau
        mag2 = (
            math.cos(angle) ** 2
            + (spin.state.population_difference * math.sin(angle)) ** 2
        )
        if mag2 == 0.0:
            vanished = True
            break
        log_z += 0.5 * math.log10(mag2)
    coh = abs(cfg.central.x_overlap)
    if vanished or coh == 0.0:
        signal = LogMagnitude.zero()
    else:
        signal = LogMagnitude(1, log_z + math.log10(coh))
    prep = prepared_state(cfg.central, dtheta)
    imbalance = abs(prep.population_difference)
    floor = log_sum(
        [log_pow(dtheta, 2.0), LogMagnitude.from_float(dtheta * imbalance)]
    )
    undecidable = signal <= floor
    return LocalVerdict(
        signal=signal,
        floor=floor,
        verdict="Undecidable" if undecidable else "Decidable",
        margin_log10=floor.log10_mag - signal.log10_mag,
    )


@dataclass(frozen=True)
class CrossoverResult:
    """Smallest environment size at which the global verdict flips.

    One entry per K-growth model; None when no N up to ``n_max`` is
    undecidable.  The comparison uses the dtheta^(2N) preparation floor
    (log10 linear in N), against which the N^5 model is guaranteed to
    cross once.
    """

    n_star_bound_model: Optional[int]
    n_star_direct_model: Optional[int]
    n_max: int
    dtheta: float


def _first_true(predicate, n_max: int) -> Optional[int]:
    """Smallest N in [1, n_max] with predicate(N) true, for monotone predicates."""
    if not predicate(n_max):
        return None
    lo, hi = 1, n_max  # invariant: predicate(hi) is true
    while lo < hi:
        mid = (lo + hi) // 2
        if predicate(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def undecidability_crossover(
    cfg_template: ExperimentConfig,
    dtheta: float,
    n_max: int,
    constants: PhysicalConstants = CODATA2018,
) -> CrossoverResult:
    """Scan N for the onset of undecidability under both K models.

    The template config supplies the per-spin scalars (tau, moments, field,
    mass); its own environment list is irrelevant to either K model, so N
    is scanned as a pure scalar.  Signal and floor are compared in log10:
    ``-K(N) log10(e) <= 2 N log10(dtheta)``.  Both predicates flip at most
    once as N grows, so the scan bisects.
    """
    dtheta = float(dtheta)
    if not (dtheta > 0.0 and math.isfinite(dtheta)):
        raise ValueError(f"dtheta must be positive and finite, got {dtheta!r}")
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max!r}")
    floor_slope = 2.0 * math.log10(dtheta)  # per unit N

    kappa = damping_exponent(cfg_template, constants) / max(cfg_template.n_env, 1)
    if cfg_template.n_env == 0:
        # Rebuild the per-spin exponent directly when the template is empty.
        kappa = (
            6.0
            * cfg_template.omega_diff(constants) ** 2
            * constants.planck_time ** (4.0 / 3.0)
            * cfg_template.tau ** (2.0 / 3.0)
        )

    def direct_predicate(n: int) -> bool:
        return -(kappa * n) * _LOG10_E <= floor_slope * n

    try:
        c_log10 = damping_exponent_lower_bound(
            cfg_template, n_env=1, constants=constants
        ).log10_mag
    except ValueError:
        # gamma1*gamma2 <= 0: the N^5 bound is undefined for this template.
        n_star_bound = None
    else:

        def bound_predicate(n: int) -> bool:
            exp10 = c_log10 + 5.0 * math.log10(n)
            if exp10 > 308.0:
                return True  # K so large the signal is zero to any precision
            return -(10.0 ** exp10) * _LOG10_E <= floor_slope * n

        n_star_bound = _first_true(bound_predicate, n_max)

    return CrossoverResult(
        n_star_bound_model=n_star_bound,
        n_star_direct_model=_first_true(direct_predicate, n_max),
        n_max=n_max,
        dtheta=dtheta,
    )
