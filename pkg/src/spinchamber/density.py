"""Validated 2x2 density matrix for the central spin."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["DensityMatrix2"]

_HERM_TOL = 1e-10
_TRACE_TOL = 1e-10
_PSD_TOL = -1e-10


@dataclass(frozen=True)
class DensityMatrix2:
    """A 2x2 Hermitian, unit-trace, positive-semidefinite matrix.

    The wrapped array is copied and frozen at construction; validation
    rejects anything that is not a physical single-qubit state within
    tight numerical tolerances.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {m.shape}")
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("density matrix contains non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > _HERM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > _TRACE_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < _PSD_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def population_up(self) -> float:
        return self.matrix[0, 0].real

    @property
    def population_down(self) -> float:
        return self.matrix[1, 1].real

    @property
    def off_diagonal(self) -> complex:
        """The (up, down) coherence element."""
        return complex(self.matrix[0, 1])

    @property
    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)
