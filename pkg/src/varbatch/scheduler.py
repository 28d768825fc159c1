"""Tolerance schedules and the minimal batch sizes that satisfy them.

A summable tolerance sequence eps_k caps the allowed batch-gradient variance
at every iteration. Inverting the variance formulas under a component
variance bound C gives the smallest admissible batch size per scheme: with
replacement the requirement ceil(C / eps) grows without bound as eps shrinks,
while without replacement ceil(N * C / ((N - 1) * eps + C)) approaches N from
below and never exceeds it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .sampling import Scheme

GEOMETRIC = "geometric"
POWER_LAW = "power-law"

# Geometric schedules underflow to exactly 0.0 for very large k; clamp far
# below any practical tolerance so downstream size ratios stay finite.
_EPSILON_FLOOR = 1e-300


@dataclass(frozen=True)
class EpsilonSchedule:
    """Summable positive tolerance sequence.

    ``geometric``: eps_k = eps0 * rho**k with rho in (0, 1).
    ``power-law``: eps_k = eps0 / (k + 1)**exponent with exponent > 1.
    Both are nonincreasing with bounded partial sums.
    """

    kind: str
    eps0: float
    rho: float | None = None
    exponent: float | None = None

    def __post_init__(self):
        if self.eps0 <= 0:
            raise ValueError("eps0 must be positive")
        if self.kind == GEOMETRIC:
            if self.rho is None or not 0.0 < self.rho < 1.0:
                raise ValueError("geometric schedule needs rho in (0, 1)")
        elif self.kind == POWER_LAW:
            if self.exponent is None or self.exponent <= 1.0:
                raise ValueError(
                    "power-law schedule needs exponent > 1 for a summable sequence"
                )
        else:
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def geometric(cls, eps0: float = 1.0, rho: float = 0.9) -> "EpsilonSchedule":
        return cls(GEOMETRIC, eps0, rho=rho)

    @classmethod
    def power_law(cls, eps0: float, exponent: float) -> "EpsilonSchedule":
        return cls(POWER_LAW, eps0, exponent=exponent)


def epsilon_at(schedule: EpsilonSchedule, k: int) -> float:
    """Tolerance eps_k; always strictly positive."""
    if k < 0:
        raise ValueError("iteration index must be nonnegative")
    if schedule.kind == GEOMETRIC:
        return max(schedule.eps0 * schedule.rho**k, _EPSILON_FLOOR)
    return schedule.eps0 / (k + 1) ** schedule.exponent


@dataclass(frozen=True)
class VarianceCap:
    """Upper bound C imposed on the component-gradient variance."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value <= 0:
            raise ValueError("variance cap must be a positive finite number")


@dataclass(frozen=True)
class BatchSizeRule:
    """Policy turning (cap, population size, eps_k) into a batch size.

    Emitted sizes always lie in [floor, n_components]. With the monotone flag
    (default) the sequence never shrinks even if eps_k plateaus numerically.
    """

    scheme: Scheme
    cap: VarianceCap
    n_components: int
    floor: int = 1
    monotone: bool = True

    def __post_init__(self):
        if self.n_components < 1:
            raise ValueError("population must contain at least one component")
        if not 1 <= self.floor <= self.n_components:
            raise ValueError(
                f"floor must be in [1, {self.n_components}], got {self.floor}"
            )


def _cap_value(cap: VarianceCap | float) -> float:
    value = cap.value if isinstance(cap, VarianceCap) else float(cap)
    if not math.isfinite(value) or value <= 0:
        raise ValueError("variance cap must be a positive finite number")
    return value


def _snap_ceil(value: float, rel: float = 1e-9) -> int:
    # Thresholds that are mathematically integral can land a hair past the
    # integer after float division (eps entered as C/N, say); snap those back
    # so the emitted size is the intended one.
    nearest = round(value)
    if abs(value - nearest) <= rel * max(1.0, abs(value)):
        return int(nearest)
    return math.ceil(value)


def batch_bound_with_replacement(cap: VarianceCap | float, eps: float) -> float:
    """Real-valued lower bound C / eps on the with-replacement batch size."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return _cap_value(cap) / eps


def batch_bound_without_replacement(
    cap: VarianceCap | float, n_components: int, eps: float
) -> float:
    """Real-valued lower bound N*C / ((N-1)*eps + C); always below N for eps > 0."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n_components < 1:
        raise ValueError("population must contain at least one component")
    c = _cap_value(cap)
    return n_components * c / ((n_components - 1) * eps + c)


def min_batch_with_replacement(
    cap: VarianceCap | float, eps: float, n_components: int, truncate: bool = True
) -> int:
    """Smallest integer batch size meeting the with-replacement variance bound.

    The requirement diverges as eps shrinks; with ``truncate`` the result is
    clamped to the population size for plotting and rule use.
    """
    if n_components < 1:
        raise ValueError("population must contain at least one component")
    size = max(1, _snap_ceil(batch_bound_with_replacement(cap, eps)))
    return min(n_components, size) if truncate else size


def min_batch_without_replacement(
    cap: VarianceCap | float, n_components: int, eps: float
) -> int:
    """Smallest integer batch size meeting the without-replacement bound.

    Stays within [1, N] for every eps > 0 and reaches N only in the eps -> 0
    limit.
    """
    bound = batch_bound_without_replacement(cap, n_components, eps)
    return min(n_components, max(1, _snap_ceil(bound)))


def next_batch_size(
    rule: BatchSizeRule,
    schedule: EpsilonSchedule,
    k: int,
    previous: int,
    cap_override: float | None = None,
) -> int:
    """Batch size for iteration ``k`` under ``rule`` and the eps schedule.

    ``cap_override`` substitutes the rule's variance cap for this call only
    (used by the auto-cap extension in the optimizer).
    """
    n = rule.n_components
    if not rule.floor <= previous <= n:
        raise ValueError(f"previous size must be in [{rule.floor}, {n}], got {previous}")
    eps = epsilon_at(schedule, k)
    cap = rule.cap.value if cap_override is None else cap_override
    if rule.scheme is Scheme.WITH_REPLACEMENT:
        size = min_batch_with_replacement(cap, eps, n, truncate=True)
    else:
        size = min_batch_without_replacement(cap, n, eps)
    size = max(rule.floor, size)
    if rule.monotone:
        size = max(previous, size)
    return size
