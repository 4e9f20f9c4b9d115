"""Physical constants used across the package.

Values are the CODATA 2018 recommended values, frozen here so results do
not drift with the installed scipy's constant tables.  The Planck time and
Planck length are always derived from ``hbar``, ``G`` and ``c`` rather than
stored, so the three base constants remain the single source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["PhysicalConstants", "CODATA2018"]


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable bundle of the SI constants the package needs.

    Parameters
    ----------
    hbar:
        Reduced Planck constant in J s.
    c:
        Speed of light in vacuum in m/s.
    G:
        Newtonian constant of gravitation in m^3 kg^-1 s^-2.
    mu0:
        Vacuum magnetic permeability in N A^-2.
    """

    hbar: float = 1.054571817e-34
    c: float = 299792458.0
    G: float = 6.67430e-11
    mu0: float = 1.25663706212e-06

    @property
    def planck_time(self) -> float:
        """Planck time sqrt(hbar G / c^5) in seconds."""
        return math.sqrt(self.hbar * self.G / self.c**5)

    @property
    def planck_length(self) -> float:
        """Planck length sqrt(hbar G / c^3) in metres."""
        return math.sqrt(self.hbar * self.G / self.c**3)


CODATA2018 = PhysicalConstants()
