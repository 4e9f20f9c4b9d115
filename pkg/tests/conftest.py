"""Shared fixtures and an independent brute-force reference engine.

The reference implementations here deliberately avoid the package's own
evolution code paths: Hamiltonians are lifted to the full 2^(n+1) space
with explicit Kronecker products and exponentiated with scipy's expm, so
any indexing or diagonalisation bug in the package shows up as a mismatch
rather than being reproduced on both sides.
"""

import numpy as np
import pytest
import scipy.linalg

from spinchamber import ExperimentConfig, QubitState

SEED = 20260825

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ID = np.eye(2, dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_qubit(rng) -> QubitState:
    v = rng.normal(size=4)
    return QubitState.renormalize(complex(v[0], v[1]), complex(v[2], v[3]))


def random_config(
    rng,
    n_env,
    f_scale=1.0,
    omega1=0.0,
    omega2=0.0,
    tau=1.0,
) -> ExperimentConfig:
    """Random states and couplings with dynamics-scale frequencies."""
    central = random_qubit(rng)
    env = [random_qubit(rng) for _ in range(n_env)]
    f = (f_scale * rng.uniform(0.1, 1.0, size=n_env)).tolist()
    return ExperimentConfig.from_frequencies(
        central, env, f, omega1=omega1, omega2=omega2, tau=tau
    )


# -- full-space reference engine -------------------------------------------


def lift(op, bit, n_qubits):
    """Embed a single-qubit operator acting on ``bit`` (bit 0 = central).

    Basis index convention matches the package: index i has bit 0 as the
    central spin, so bit j sits at Kronecker position n_qubits - 1 - j.
    """
    left = np.eye(2 ** (n_qubits - 1 - bit), dtype=complex)
    right = np.eye(2**bit, dtype=complex)
    return np.kron(left, np.kron(op, right))


def reference_window_hamiltonian(cfg, k, n_qubits, dephasing=False, constants=None):
    """Full-space H for window k (env bit k+1), built from lifted Paulis."""
    from spinchamber import CODATA2018

    constants = constants or CODATA2018
    f = cfg.env[k].f
    bit = k + 1
    h = f * lift(SZ, 0, n_qubits) @ lift(SZ, bit, n_qubits)
    if not dephasing:
        h = h + f * (
            lift(SX, 0, n_qubits) @ lift(SX, bit, n_qubits)
            + lift(SY, 0, n_qubits) @ lift(SY, bit, n_qubits)
        )
    h = h + cfg.omega_central(constants) * lift(SZ, 0, n_qubits)
    h = h + cfg.omega_env(constants) * lift(SZ, bit, n_qubits)
    return h


def reference_evolve(cfg, dephasing=False):
    """Sequential evolution via scipy.linalg.expm in the full space."""
    n_qubits = cfg.n_env + 1
    psi = np.array([cfg.central.up, cfg.central.down], dtype=complex)
    for spin in cfg.env:
        psi = np.kron(np.array([spin.state.up, spin.state.down], dtype=complex), psi)
    for k in range(cfg.n_env):
        h = reference_window_hamiltonian(cfg, k, n_qubits, dephasing=dephasing)
        psi = scipy.linalg.expm(-1j * h * cfg.tau) @ psi
    return psi


def reference_partial_trace(psi, n_env):
    """Central-spin reduced density matrix by explicit index summation."""
    rho = np.zeros((2, 2), dtype=complex)
    for i in (0, 1):
        for j in (0, 1):
            for e in range(2**n_env):
                rho[i, j] += psi[2 * e + i] * np.conj(psi[2 * e + j])
    return rho


def reference_x_string(psi, n_qubits):
    """<psi| sx x ... x sx |psi> with the operator built by Kronecker products."""
    op = np.eye(1, dtype=complex)
    for _ in range(n_qubits):
        op = np.kron(op, SX)
    return float(np.real(np.conj(psi) @ op @ psi))
