"""
Threshold schedules eta_n and z_n rules for overflow sweeps
"""
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from overflow_core.errors import InvalidInputError

SCHEDULE_KINDS = ("first", "second", "explicit")
Z_RULE_KINDS = ("direct", "converse", "constant")
DEFAULT_GAMMA = 0.1


@dataclass(frozen=True)
class ThresholdSchedule:
    """
    Cost threshold eta_n per block length.

    first:    eta_n = n R
    second:   eta_n = n a + sqrt(n) L
    explicit: eta_n looked up in a table
    """
    kind: str
    rate: Optional[float] = None
    a: Optional[float] = None
    L: Optional[float] = None
    table: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise InvalidInputError(f"unknown schedule kind {self.kind!r}; expected one of {SCHEDULE_KINDS}")
        if self.kind == "first" and self.rate is None:
            raise InvalidInputError("first-order schedule needs a rate R")
        if self.kind == "second" and (self.a is None or self.L is None):
            raise InvalidInputError("second-order schedule needs a and L")
        if self.kind == "explicit" and not self.table:
            raise InvalidInputError("explicit schedule needs at least one (n, eta) entry")

    @classmethod
    def first_order(cls, rate: float) -> "ThresholdSchedule":
        return cls(kind="first", rate=float(rate))

    @classmethod
    def second_order(cls, a: float, L: float) -> "ThresholdSchedule":
        return cls(kind="second", a=float(a), L=float(L))

    @classmethod
    def explicit(cls, n_list: Sequence[int], etas: Sequence[float]) -> "ThresholdSchedule":
        if len(n_list) != len(etas):
            raise InvalidInputError(f"{len(n_list)} block lengths but {len(etas)} thresholds")
        return cls(kind="explicit", table={int(n): float(e) for n, e in zip(n_list, etas)})

    def eta(self, n: int) -> float:
        """
        Threshold at block length n.

        Raises:
            InvalidInputError: If eta_n is not positive and finite, or n is missing from an explicit table
        """
        if self.kind == "first":
            value = n * self.rate
        elif self.kind == "second":
            value = n * self.a + math.sqrt(n) * self.L
        else:
            if n not in self.table:
                raise InvalidInputError(f"explicit schedule has no threshold for n={n}")
            value = self.table[n]
        if not (math.isfinite(value) and value > 0):
            raise InvalidInputError(f"threshold eta_{n}={value} must be positive and finite")
        return float(value)

    def describe(self) -> str:
        if self.kind == "first":
            return f"first(R={self.rate:g})"
        if self.kind == "second":
            return f"second(a={self.a:g},L={self.L:g})"
        return f"explicit({len(self.table)})"


@dataclass(frozen=True)
class ZRule:
    """
    Free parameter z_n > 0 of the overflow bounds.

    direct:   z_n = K^(-sqrt(n) gamma)
    converse: z_n = K^(-n gamma)
    constant: z_n = value
    """
    kind: str = "direct"
    gamma: float = DEFAULT_GAMMA
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in Z_RULE_KINDS:
            raise InvalidInputError(f"unknown z rule {self.kind!r}; expected one of {Z_RULE_KINDS}")
        if self.kind == "constant":
            if self.value is None or not (math.isfinite(self.value) and self.value > 0):
                raise InvalidInputError(f"z must be positive and finite, got {self.value}")
        elif not math.isfinite(self.gamma):
            raise InvalidInputError(f"gamma must be finite, got {self.gamma}")

    def z(self, n: int, K: int) -> float:
        if self.kind == "direct":
            return float(K) ** (-math.sqrt(n) * self.gamma)
        if self.kind == "converse":
            return float(K) ** (-n * self.gamma)
        return float(self.value)

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant({self.value:g})"
        return f"{self.kind}(gamma={self.gamma:g})"
