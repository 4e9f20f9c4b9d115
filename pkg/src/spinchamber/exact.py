"""Exact sequential evolution of the central spin plus its environment.

Each environment spin crosses the chamber in its own flight window of
length tau and interacts with the central spin only during that window;
spins that have already left are idle.  The per-window pair Hamiltonian (in
angular-frequency units, spin operators realised as Pauli matrices) is

    H_k = omega1 * sz x I  +  omega2 * I x sz  +  f_k * (sx x sx + sy x sy + sz x sz)

with omega_i = gamma_i * B / hbar.  An optional dephasing mode keeps only
the sz x sz part of the coupling, which makes the closed forms in
:mod:`spinchamber.analytic` exact instead of weak-coupling approximations.

State indexing: basis index bit 0 is the central spin (0 = up, 1 = down)
and bit k (1-based) is the k-th environment spin in flight order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import ExperimentConfig, QubitState
from .constants import CODATA2018, PhysicalConstants
from .density import DensityMatrix2

__all__ = [
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "IDENTITY2",
    "CapExceededError",
    "StateVector",
    "DEFAULT_ENV_CAP",
    "pair_hamiltonian",
    "evolve_sequential",
    "partial_trace_env",
    "x_string_expectation",
    "x_string_expectation_collapsed",
]

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)

#: Largest environment the exact engine evolves without an explicit override.
DEFAULT_ENV_CAP = 12


class CapExceededError(ValueError):
    """Environment too large for dense evolution at the configured cap."""


@dataclass(frozen=True)
class StateVector:
    """Dense state of central spin + n_env environment spins.

    ``amps[i]`` is the amplitude of the product basis state whose bit 0 is
    the central spin (0 = up) and whose bit k is the k-th environment spin.
    """

    amps: np.ndarray
    n_env: int

    def __post_init__(self) -> None:
        a = np.array(self.amps, dtype=complex)
        if a.shape != (2 ** (self.n_env + 1),):
            raise ValueError(
                f"amplitude vector has length {a.size}, expected 2**{self.n_env + 1}"
            )
        if not np.all(np.isfinite(a.view(float))):
            raise ValueError("state vector contains non-finite amplitudes")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def product(cls, central: QubitState, env: Sequence[QubitState]) -> "StateVector":
        """Product state |central> x |env_1> x ... x |env_N>."""
        amps = np.array([central.up, central.down], dtype=complex)
        for spin in env:
            # New spin becomes the most significant bit.
            amps = np.kron(np.array([spin.up, spin.down], dtype=complex), amps)
        return cls(amps=amps, n_env=len(env))

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def pair_hamiltonian(
    cfg: ExperimentConfig,
    k: int,
    include_zeeman: bool = True,
    dephasing: bool = False,
    constants: PhysicalConstants = CODATA2018,
) -> np.ndarray:
    """4x4 Hermitian window Hamiltonian for the k-th environment spin.

    Basis order is |up,up>, |up,down>, |down,up>, |down,down> with the
    central spin first.  Entries are angular frequencies (rad/s).

    Parameters
    ----------
    cfg:
        Experiment parameters; ``cfg.env[k]`` supplies the coupling f_k.
    k:
        Zero-based index into the environment list.
    include_zeeman:
        If False, only the spin-spin coupling term is returned.
    dephasing:
        If True, the coupling is truncated to its sz x sz part.
    """
    if not 0 <= k < cfg.n_env:
        raise ValueError(f"environment index {k} out of range for n_env={cfg.n_env}")
    f = cfg.env[k].f
    h = f * np.kron(PAULI_Z, PAULI_Z)
    if not dephasing:
        h = h + f * (np.kron(PAULI_X, PAULI_X) + np.kron(PAULI_Y, PAULI_Y))
    if include_zeeman:
        om1 = cfg.omega_central(constants)
        om2 = cfg.omega_env(constants)
        h = h + om1 * np.kron(PAULI_Z, IDENTITY2) + om2 * np.kron(IDENTITY2, PAULI_Z)
    return h


def _window_unitary(
    cfg: ExperimentConfig,
    k: int,
    interaction_picture: bool,
    dephasing: bool,
    constants: PhysicalConstants,
) -> np.ndarray:
    """exp(-i H_k tau), optionally with the window's Zeeman phases removed."""
    h = pair_hamiltonian(cfg, k, include_zeeman=True, dephasing=dephasing,
                         constants=constants)
    # 4x4 Hermitian: diagonalise exactly rather than series-expanding.
    evals, vecs = np.linalg.eigh(h)
    u = (vecs * np.exp(-1j * evals * cfg.tau)) @ vecs.conj().T
    if interaction_picture:
        om1 = cfg.omega_central(constants)
        om2 = cfg.omega_env(constants)
        zeeman_diag = np.array([om1 + om2, om1 - om2, -om1 + om2, -om1 - om2])
        u = (np.exp(1j * zeeman_diag * cfg.tau)[:, None]) * u
    return u


def _apply_pair(amps: np.ndarray, u4: np.ndarray, n_qubits: int, k: int) -> np.ndarray:
    """Apply a two-qubit unitary to (central bit 0, environment bit k)."""
    t = amps.reshape([2] * n_qubits)
    # Axis j of the reshaped tensor corresponds to bit (n_qubits - 1 - j).
    ax_central = n_qubits - 1
    ax_env = n_qubits - 1 - k
    t = np.moveaxis(t, (ax_central, ax_env), (0, 1))
    v = u4.reshape(2, 2, 2, 2)  # [c', e', c, e]
    t = np.einsum("abcd,cd...->ab...", v, t)
    t = np.moveaxis(t, (0, 1), (ax_central, ax_env))
    return t.reshape(-1)


def evolve_sequential(
    cfg: ExperimentConfig,
    interaction_picture: bool = False,
    dephasing: bool = False,
    n_cap: int = DEFAULT_ENV_CAP,
    constants: PhysicalConstants = CODATA2018,
) -> StateVector:
    """Evolve the initial product state through all N flight windows.

    Window k applies U_k = exp(-i H_k tau) to the (central, k-th) pair and
    leaves every other spin untouched.  With ``interaction_picture`` set,
    each window's Zeeman phases are stripped, so the result contains only
    the coupling-induced phases and is directly comparable to the
    weak-coupling branch form in :mod:`spinchamber.analytic`.

    Raises
    ------
    CapExceededError
        If ``cfg.n_env`` exceeds ``n_cap`` (default 12); pass a larger
        ``n_cap`` explicitly to accept the exponential cost.
    """
    if cfg.n_env > n_cap:
        raise CapExceededError(
            f"n_env = {cfg.n_env} exceeds the exact-evolution cap of {n_cap}; "
            f"pass n_cap={cfg.n_env} to override"
        )
    psi = StateVector.product(cfg.central, tuple(s.state for s in cfg.env))
    amps = np.array(psi.amps, dtype=complex)
    n_qubits = cfg.n_env + 1
    for k in range(cfg.n_env):
        u4 = _window_unitary(cfg, k, interaction_picture, dephasing, constants)
        amps = _apply_pair(amps, u4, n_qubits, k + 1)
    return StateVector(amps=amps, n_env=cfg.n_env)


def partial_trace_env(psi: StateVector) -> DensityMatrix2:
    """Reduced density matrix of the central spin."""
    a = psi.amps.reshape(-1, 2)  # [env configuration, central bit]
    rho = a.T @ a.conj()
    return DensityMatrix2(rho)


def x_string_expectation(psi: StateVector) -> float:
    """Expectation of the all-spin X string sx x sx x ... x sx.

    The string flips every bit, so its matrix elements pair each basis
    index i with its bitwise complement 2**n - 1 - i; the expectation is
    the overlap of the amplitudes with their reversed selves.
    """
    val = np.vdot(psi.amps, psi.amps[::-1])
    return float(val.real)


def x_string_expectation_collapsed(cfg: ExperimentConfig) -> float:
    """X-string expectation after z-basis collapse of the central spin.

    Models readout-by-collapse: the final state is replaced by the
    statistical mixture of the two central-spin branches.  Each branch is a
    product state whose central factor is a z eigenstate, so its X-string
    expectation carries a factor <up|sx|up> = 0 (or <down|sx|down> = 0) and
    the mixture expectation vanishes identically.  The sum is still carried
    out term by term rather than short-circuited.
    """
    total = 0.0
    for branch_sign, weight in (
        (+1, abs(cfg.central.up) ** 2),
        (-1, abs(cfg.central.down) ** 2),
    ):
        central_factor = 0.0  # <z eigenstate| sx |z eigenstate>
        env_factor = 1.0
        for spin in cfg.env:
            phase = cmath.exp(-1j * branch_sign * spin.f * cfg.tau)
            chi_up = spin.state.up * phase
            chi_down = spin.state.down * phase.conjugate()
            env_factor *= 2.0 * (chi_up * chi_down.conjugate()).real
        total += weight * central_factor * env_factor
    return total
