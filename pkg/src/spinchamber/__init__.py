"""Central-spin decoherence with real clocks and measurement floors.

A single spin-1/2 sits in a field chamber while N environment spins fly
through one at a time, entangling with it window by window.  The package
provides:

* an exact dense engine for the sequential dynamics (``exact``),
* closed-form branch states, decoherence factors and X-string
  expectations, including real-clock damping (``analytic``),
* physical floors on angle resolution and their propagation into readout
  error budgets (``limits``),
* feasibility screening and log-domain verdicts on whether unitary
  evolution and collapse can be told apart at all (``verdict``),
* a JSON/CSV command line front end (``cli``).
"""

from .constants import CODATA2018, PhysicalConstants
from .logmag import LogMagnitude, log_exp_neg, log_pow, log_sum
from .config import EnvSpin, ExperimentConfig, QubitState
from .density import DensityMatrix2
from .exact import (
    CapExceededError,
    DEFAULT_ENV_CAP,
    StateVector,
    evolve_sequential,
    pair_hamiltonian,
    partial_trace_env,
    x_string_expectation,
    x_string_expectation_collapsed,
)
from .analytic import (
    BranchState,
    ClockParams,
    WeakCouplingWarning,
    damp_off_diagonals,
    decoherence_factor,
    off_diagonal_damping,
    reduced_density_matrix,
    weak_coupling_branches,
    x_string_expectation_realclock,
    x_string_expectation_realclock_log,
    x_string_expectation_unitary,
)
from .limits import (
    AngleBoundReport,
    ErrorBudget,
    MeasuringDevice,
    SxMeasurement,
    XStringMeasurement,
    angle_resolution_floor,
    cross_term_budget,
    prepared_state,
    sx_measurement,
    tilted_spin_operator,
    x_string_measurement,
)
from .verdict import (
    Condition,
    CrossoverResult,
    FeasibilityReport,
    LocalVerdict,
    UndecidabilityVerdict,
    damping_exponent,
    damping_exponent_lower_bound,
    decide,
    decide_local,
    dipolar_coupling_rate,
    feasibility_check,
    undecidability_crossover,
)

__version__ = "0.1.0"

__all__ = [
    "CODATA2018",
    "PhysicalConstants",
    "LogMagnitude",
    "log_exp_neg",
    "log_pow",
    "log_sum",
    "QubitState",
    "EnvSpin",
    "ExperimentConfig",
    "DensityMatrix2",
    "StateVector",
    "CapExceededError",
    "DEFAULT_ENV_CAP",
    "pair_hamiltonian",
    "evolve_sequential",
    "partial_trace_env",
    "x_string_expectation",
    "x_string_expectation_collapsed",
    "ClockParams",
    "BranchState",
    "WeakCouplingWarning",
    "weak_coupling_branches",
    "decoherence_factor",
    "reduced_density_matrix",
    "x_string_expectation_unitary",
    "x_string_expectation_realclock",
    "x_string_expectation_realclock_log",
    "off_diagonal_damping",
    "damp_off_diagonals",
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
    "Condition",
    "FeasibilityReport",
    "dipolar_coupling_rate",
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
