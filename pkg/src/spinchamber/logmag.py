"""Sign/log10 representation for quantities far below float underflow.

Several results in this package -- damped coherences like exp(-K) for
K ~ 10^2..10^8, or preparation floors like dtheta^(2N) with dtheta ~ 1e-62 --
are not representable as IEEE doubles.  ``LogMagnitude`` stores a sign in
{-1, 0, +1} together with log10 of the absolute value, supports exact
multiplication and ordering, and converts back to floats on demand (with
0.0 / inf saturation outside the representable range).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Union

__all__ = [
    "LogMagnitude",
    "log_exp_neg",
    "log_pow",
    "log_sum",
]

_LOG10_E = math.log10(math.e)


@total_ordering
@dataclass(frozen=True)
class LogMagnitude:
    """A real number stored as (sign, log10|value|).

    ``sign`` is -1, 0 or +1; ``log10_mag`` is log10 of the magnitude and is
    fixed to 0.0 when the value is zero.  Ordering agrees with the ordering
    of the represented real numbers, so e.g. any negative value sorts below
    zero, which sorts below any positive value.
    """

    sign: int
    log10_mag: float

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0 and self.log10_mag != 0.0:
            object.__setattr__(self, "log10_mag", 0.0)
        if not math.isfinite(self.log10_mag):
            raise ValueError(f"log10 magnitude must be finite, got {self.log10_mag!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_float(cls, value: float) -> "LogMagnitude":
        """Represent an ordinary finite float."""
        if not math.isfinite(value):
            raise ValueError(f"cannot represent non-finite value {value!r}")
        if value == 0.0:
            return cls(0, 0.0)
        return cls(1 if value > 0 else -1, math.log10(abs(value)))

    @classmethod
    def zero(cls) -> "LogMagnitude":
        return cls(0, 0.0)

    @classmethod
    def one(cls) -> "LogMagnitude":
        return cls(1, 0.0)

    # -- conversions -------------------------------------------------------

    def to_float(self) -> float:
        """Best-effort float value: 0.0 on underflow, +-inf on overflow."""
        if self.sign == 0:
            return 0.0
        try:
            mag = 10.0 ** self.log10_mag
        except OverflowError:
            mag = math.inf
        return self.sign * mag

    def __float__(self) -> float:
        return self.to_float()

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other: "LogMagnitude") -> "LogMagnitude":
        if not isinstance(other, LogMagnitude):
            return NotImplemented
        sign = self.sign * other.sign
        if sign == 0:
            return LogMagnitude(0, 0.0)
        return LogMagnitude(sign, self.log10_mag + other.log10_mag)

    def __neg__(self) -> "LogMagnitude":
        return LogMagnitude(-self.sign, self.log10_mag if self.sign else 0.0)

    def __abs__(self) -> "LogMagnitude":
        if self.sign == 0:
            return LogMagnitude(0, 0.0)
        return LogMagnitude(1, self.log10_mag)

    # -- ordering ----------------------------------------------------------

    def _key(self) -> tuple:
        # sign * log10_mag orders magnitudes the right way round on each
        # side of zero (bigger magnitude = bigger positive, smaller negative).
        return (self.sign, self.sign * self.log10_mag)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogMagnitude):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other: "LogMagnitude") -> bool:
        if not isinstance(other, LogMagnitude):
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash(self._key())


def log_exp_neg(exponent: float) -> LogMagnitude:
    """exp(-exponent) as a LogMagnitude, valid for any finite exponent.

    The result is always positive with log10 magnitude ``-exponent*log10(e)``,
    e.g. ``log_exp_neg(300)`` has log10 magnitude -130.288... even though
    exp(-300) would still be a representable float and exp(-10^6) would not.
    """
    if not math.isfinite(exponent):
        raise ValueError(f"exponent must be finite, got {exponent!r}")
    return LogMagnitude(1, -exponent * _LOG10_E)


def log_pow(base: float, exponent: float) -> LogMagnitude:
    """base**exponent as a LogMagnitude for strictly positive base."""
    if not (base > 0.0) or not math.isfinite(base):
        raise ValueError(f"base must be a finite positive float, got {base!r}")
    if not math.isfinite(exponent):
        raise ValueError(f"exponent must be finite, got {exponent!r}")
    return LogMagnitude(1, exponent * math.log10(base))


def log_sum(values: Iterable[Union[LogMagnitude, float]]) -> LogMagnitude:
    """Sum of non-negative values carried out in the log10 domain.

    Only non-negative terms are accepted; summation of mixed signs would
    need cancellation handling that nothing in this package requires.
    """
    terms = []
    for v in values:
        lm = v if isinstance(v, LogMagnitude) else LogMagnitude.from_float(v)
        if lm.sign < 0:
            raise ValueError("log_sum only accepts non-negative terms")
        if lm.sign > 0:
            terms.append(lm.log10_mag)
    if not terms:
        return LogMagnitude.zero()
    top = max(terms)
    acc = sum(10.0 ** (t - top) for t in terms)
    return LogMagnitude(1, top + math.log10(acc))
