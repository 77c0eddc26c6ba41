"""Signed log-domain scalars.

Values of spherical integrals grow like e^{Θ(NM)} and leave the float range
long before the dimensions of interest, so they travel as (sign, log|x|).
"""

import math
from dataclasses import dataclass
from functools import total_ordering

from app.errors import DomainError


@total_ordering
@dataclass(frozen=True)
class LogScalar:
    """A real number stored as its sign and the natural log of its magnitude.

    ``sign`` is 0 exactly when ``log_abs`` is −∞.
    """

    sign: int
    log_abs: float

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise DomainError(f"LogScalar sign must be -1, 0 or 1, got {self.sign}")
        if math.isnan(self.log_abs):
            raise DomainError("LogScalar magnitude is NaN")
        if (self.sign == 0) != (self.log_abs == -math.inf):
            # Normalize so that zero has a single representation
            object.__setattr__(self, "sign", 0)
            object.__setattr__(self, "log_abs", -math.inf)

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0, -math.inf)

    @classmethod
    def one(cls) -> "LogScalar":
        return cls(1, 0.0)

    @classmethod
    def exp(cls, x: float) -> "LogScalar":
        """e^x, which is never zero."""
        return cls(1, float(x))

    @classmethod
    def from_float(cls, value: float) -> "LogScalar":
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    def to_float(self) -> float:
        """Plain float value; overflows to ±inf and underflows to 0."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_abs)
        except OverflowError:
            return self.sign * math.inf

    @property
    def log(self) -> float:
        """Natural log of a positive value."""
        if self.sign != 1:
            raise DomainError(f"log of a non-positive LogScalar (sign {self.sign})")
        return self.log_abs

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.log_abs)

    def __abs__(self) -> "LogScalar":
        return LogScalar(abs(self.sign), self.log_abs)

    def __add__(self, other: "LogScalar") -> "LogScalar":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_abs >= other.log_abs else (other, self)
        ratio = math.exp(small.log_abs - big.log_abs)
        if big.sign == small.sign:
            return LogScalar(big.sign, big.log_abs + math.log1p(ratio))
        if ratio == 1.0:
            return LogScalar.zero()
        return LogScalar(big.sign, big.log_abs + math.log1p(-ratio))

    def __sub__(self, other: "LogScalar") -> "LogScalar":
        return self + (-other)

    def __mul__(self, other: "LogScalar") -> "LogScalar":
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogScalar") -> "LogScalar":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScalar")
        if self.sign == 0:
            return self
        return LogScalar(self.sign * other.sign, self.log_abs - other.log_abs)

    def _key(self) -> tuple[int, float]:
        # Larger magnitude means smaller value for negatives
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.log_abs)

    def __lt__(self, other: "LogScalar") -> bool:
        if not isinstance(other, LogScalar):
            return NotImplemented
        return self._key() < other._key()

    def as_dict(self) -> dict:
        # JSON has no −∞; zero travels as log_abs null
        return {"sign": self.sign, "log_abs": self.log_abs if self.sign != 0 else None}
