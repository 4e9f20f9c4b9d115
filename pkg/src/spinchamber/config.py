"""Experiment description: spin states and the chamber parameter set.

The model is a single central spin-1/2 held in a field chamber while N
environment spins fly through one at a time.  ``ExperimentConfig`` collects
everything in SI units; dynamics code works in angular frequencies (rad/s)
obtained from the ``omega_*`` helpers, i.e. energies divided by hbar.

Amplitude convention: a ``QubitState`` stores the ``up`` and ``down``
components of a spin-1/2 state in the z basis.  JSON serialisation writes
every complex amplitude as a two-element ``[re, im]`` array.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple, Union

from .constants import CODATA2018, PhysicalConstants

__all__ = ["QubitState", "EnvSpin", "ExperimentConfig"]

_NORM_TOL = 1e-12

ComplexLike = Union[complex, float, int]


def _as_pair(z: complex) -> list:
    return [z.real, z.imag]


def _from_pair(v, where: str) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ValueError(f"{where}: amplitudes must be [re, im] pairs, got {v!r}")
    return complex(float(v[0]), float(v[1]))


@dataclass(frozen=True)
class QubitState:
    """Normalised spin-1/2 state (z-basis amplitudes).

    Construction rejects states whose squared norm deviates from 1 by more
    than 1e-12; use :meth:`renormalize` when building states from raw,
    not-yet-normalised amplitudes.
    """

    up: complex
    down: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "up", complex(self.up))
        object.__setattr__(self, "down", complex(self.down))
        n = abs(self.up) ** 2 + abs(self.down) ** 2
        if not math.isfinite(n) or abs(n - 1.0) > _NORM_TOL:
            raise ValueError(
                f"qubit state must be normalised (|up|^2+|down|^2 = {n!r})"
            )

    @classmethod
    def renormalize(cls, up: ComplexLike, down: ComplexLike) -> "QubitState":
        """Build a state from unnormalised amplitudes by rescaling."""
        up, down = complex(up), complex(down)
        n = math.sqrt(abs(up) ** 2 + abs(down) ** 2)
        if n == 0.0 or not math.isfinite(n):
            raise ValueError("cannot normalise a zero or non-finite amplitude pair")
        return cls(up / n, down / n)

    @property
    def population_difference(self) -> float:
        """<sigma_z> = |up|^2 - |down|^2."""
        return abs(self.up) ** 2 - abs(self.down) ** 2

    @property
    def x_overlap(self) -> float:
        """<sigma_x> = 2 Re(up * conj(down))."""
        return 2.0 * (self.up * self.down.conjugate()).real

    @property
    def coherence(self) -> complex:
        """Off-diagonal product up * conj(down)."""
        return self.up * self.down.conjugate()

    def to_json_dict(self) -> dict:
        return {"up": _as_pair(self.up), "down": _as_pair(self.down)}

    @classmethod
    def from_json_dict(cls, d: dict, where: str = "state") -> "QubitState":
        try:
            up = _from_pair(d["up"], f"{where}.up")
            down = _from_pair(d["down"], f"{where}.down")
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{where}: expected keys 'up' and 'down'") from exc
        return cls(up, down)


@dataclass(frozen=True)
class EnvSpin:
    """One environment spin: its incoming state and its coupling strength.

    ``f`` is the spin-spin coupling during this spin's flight window, as an
    angular frequency in rad/s.
    """

    state: QubitState
    f: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "f", float(self.f))
        if not math.isfinite(self.f):
            raise ValueError(f"coupling f must be finite, got {self.f!r}")

    def to_json_dict(self) -> dict:
        return {"state": self.state.to_json_dict(), "f": self.f}

    @classmethod
    def from_json_dict(cls, d: dict, where: str = "env[?]") -> "EnvSpin":
        if "state" not in d or "f" not in d:
            raise ValueError(f"{where}: expected keys 'state' and 'f'")
        return cls(QubitState.from_json_dict(d["state"], f"{where}.state"), float(d["f"]))


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameter set for one run, in SI units.

    Parameters
    ----------
    central:
        Initial state of the central spin.
    env:
        Ordered environment spins, in flight order.
    B:
        Chamber magnetic field in tesla.
    gamma1:
        Central-spin magnetic moment in J/T.
    gamma2:
        Environment-spin magnetic moment in J/T.
    tau:
        Flight time of each environment spin through the chamber, seconds.
    T_total:
        Duration of the whole experiment, seconds (at least n_env * tau).
    m:
        Mass of an environment particle, kg.
    d:
        Closest-approach distance between central and environment spins, m.
    """

    central: QubitState
    env: Tuple[EnvSpin, ...]
    B: float
    gamma1: float
    gamma2: float
    tau: float
    T_total: float
    m: float
    d: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "env", tuple(self.env))
        for name in ("B", "gamma1", "gamma2", "tau", "T_total", "m", "d"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.tau > 0.0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive and finite, got {self.tau!r}")
        if self.T_total < self.n_env * self.tau:
            raise ValueError(
                f"T_total = {self.T_total!r} is shorter than n_env * tau = "
                f"{self.n_env * self.tau!r}"
            )
        if not (self.m > 0.0):
            raise ValueError(f"m must be positive, got {self.m!r}")
        if not (self.d > 0.0):
            raise ValueError(f"d must be positive, got {self.d!r}")
        for name in ("B", "gamma1", "gamma2", "T_total"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    # -- basic derived quantities -----------------------------------------

    @property
    def n_env(self) -> int:
        """Number of environment spins N."""
        return len(self.env)

    @property
    def couplings(self) -> Tuple[float, ...]:
        """All per-spin couplings f_k in flight order (rad/s)."""
        return tuple(s.f for s in self.env)

    def omega_central(self, constants: PhysicalConstants = CODATA2018) -> float:
        """Central-spin Zeeman angular frequency gamma1*B/hbar (rad/s)."""
        return self.gamma1 * self.B / constants.hbar

    def omega_env(self, constants: PhysicalConstants = CODATA2018) -> float:
        """Environment-spin Zeeman angular frequency gamma2*B/hbar (rad/s)."""
        return self.gamma2 * self.B / constants.hbar

    def omega_diff(self, constants: PhysicalConstants = CODATA2018) -> float:
        """Detuning B*(gamma1-gamma2)/hbar (rad/s); sets the phase scale."""
        return self.B * (self.gamma1 - self.gamma2) / constants.hbar

    # -- convenience construction -----------------------------------------

    @classmethod
    def from_frequencies(
        cls,
        central: QubitState,
        env_states: Sequence[QubitState],
        f: Union[float, Sequence[float]],
        omega1: float,
        omega2: float = 0.0,
        tau: float = 1.0,
        T_total: float | None = None,
        m: float = 9.1093837015e-31,
        d: float = 1.0e-9,
        constants: PhysicalConstants = CODATA2018,
    ) -> "ExperimentConfig":
        """Build a config directly from angular frequencies.

        Sets B = 1 T and chooses the moments so that gamma_i * B / hbar equals
        the requested omegas.  Intended for dynamics-only studies and tests
        where the SI decomposition of the Zeeman energies is irrelevant; the
        ``m`` and ``d`` defaults (electron mass, 1 nm) are placeholders.
        """
        if isinstance(f, (int, float)):
            fs = [float(f)] * len(env_states)
        else:
            fs = [float(x) for x in f]
            if len(fs) != len(env_states):
                raise ValueError("need one coupling per environment state")
        env = tuple(EnvSpin(s, fk) for s, fk in zip(env_states, fs))
        if T_total is None:
            T_total = len(env) * tau if env else tau
        return cls(
            central=central,
            env=env,
            B=1.0,
            gamma1=omega1 * constants.hbar,
            gamma2=omega2 * constants.hbar,
            tau=tau,
            T_total=T_total,
            m=m,
            d=d,
        )

    # -- JSON --------------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "central": self.central.to_json_dict(),
            "env": [s.to_json_dict() for s in self.env],
            "B": self.B,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "tau": self.tau,
            "T_total": self.T_total,
            "m": self.m,
            "d": self.d,
        }

    def to_json(self, **dumps_kwargs) -> str:
        return json.dumps(self.to_json_dict(), **dumps_kwargs)

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentConfig":
        required = {"central", "env", "B", "gamma1", "gamma2", "tau", "T_total", "m", "d"}
        missing = required - set(d)
        if missing:
            raise ValueError(f"config is missing fields: {sorted(missing)}")
        env = tuple(
            EnvSpin.from_json_dict(e, f"env[{i}]") for i, e in enumerate(d["env"])
        )
        return cls(
            central=QubitState.from_json_dict(d["central"], "central"),
            env=env,
            B=float(d["B"]),
            gamma1=float(d["gamma1"]),
            gamma2=float(d["gamma2"]),
            tau=float(d["tau"]),
            T_total=float(d["T_total"]),
            m=float(d["m"]),
            d=float(d["d"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_json_dict(json.loads(text))
