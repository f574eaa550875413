"""Data types and point estimators for VE and symmetric VE."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DomainError, UndefinedEffectError


@dataclass(frozen=True)
class TwoArmCounts:
    """Event counts and arm sizes; arm 0 is unvaccinated, arm 1 vaccinated."""

    x0: int
    n0: int
    x1: int
    n1: int

    def __post_init__(self):
        for name in ("x0", "n0", "x1", "n1"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                if isinstance(v, float) and v.is_integer():
                    object.__setattr__(self, name, int(v))
                else:
                    try:
                        object.__setattr__(self, name, int(v.__index__()))
                    except (AttributeError, TypeError):
                        raise DomainError(f"{name} must be an integer, got {v!r}") from None
        if self.n0 < 1 or self.n1 < 1:
            raise DomainError(f"arm sizes must be >= 1, got n0={self.n0}, n1={self.n1}")
        if not 0 <= self.x0 <= self.n0:
            raise DomainError(f"need 0 <= x0 <= n0, got x0={self.x0}, n0={self.n0}")
        if not 0 <= self.x1 <= self.n1:
            raise DomainError(f"need 0 <= x1 <= n1, got x1={self.x1}, n1={self.n1}")

    def swapped(self) -> TwoArmCounts:
        return TwoArmCounts(self.x1, self.n1, self.x0, self.n0)

    @property
    def total_events(self) -> int:
        return self.x0 + self.x1


@dataclass(frozen=True)
class RiskPair:
    p0: float
    p1: float

    def __post_init__(self):
        if not (0.0 <= self.p0 <= 1.0 and 0.0 <= self.p1 <= 1.0):
            raise DomainError(f"risks must lie in [0, 1], got p0={self.p0}, p1={self.p1}")


class EffectKind(enum.Enum):
    VE = "VE"
    SVE = "SVE"
    SVE_BC = "SVE_BC"
    SVE_FROM_THETA = "SVE_FROM_THETA"


@dataclass(frozen=True)
class EffectEstimate:
    value: float
    kind: EffectKind
    # True when the estimate is pinned at +/-1 by a zero-event arm
    boundary: bool = False

    def __post_init__(self):
        if self.kind is EffectKind.VE:
            if not self.value <= 1.0:
                raise DomainError(f"VE must be <= 1, got {self.value}")
        elif not -1.0 <= self.value <= 1.0:
            raise DomainError(f"{self.kind.value} must lie in [-1, 1], got {self.value}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class RelativeEffect:
    """A fitted multiplicative effect (hazard or rate ratio) and SE(log theta)."""

    theta_hat: float
    se_log_theta: float = 0.0

    def __post_init__(self):
        if not self.theta_hat > 0:
            raise DomainError(f"theta_hat must be positive, got {self.theta_hat}")
        if not self.se_log_theta >= 0:
            raise DomainError(f"se_log_theta must be nonnegative, got {self.se_log_theta}")


def empirical_risks(counts: TwoArmCounts) -> RiskPair:
    return RiskPair(counts.x0 / counts.n0, counts.x1 / counts.n1)


def _sve(p0: float, p1: float) -> float:
    # shared by sve_point and the vectorised paths so p0 >= p1 reproduces VE exactly
    if p0 >= p1:
        return 1.0 - p1 / p0
    return p0 / p1 - 1.0


def ve_point(risks: RiskPair) -> EffectEstimate:
    """Traditional VE, ``1 - p1/p0``."""
    if risks.p0 == 0:
        raise UndefinedEffectError("VE is undefined when the unvaccinated risk is zero")
    return EffectEstimate(1.0 - risks.p1 / risks.p0, EffectKind.VE)


def sve_point(risks: RiskPair) -> EffectEstimate:
    """Symmetric VE, ``(p0 - p1) / max(p0, p1)``.

    Written as ``1 - p1/p0`` or ``p0/p1 - 1`` by branch, which is the same
    quantity and keeps the protective branch bit-identical to :func:`ve_point`
    and the harmful branch its exact mirror.
    """
    p0, p1 = risks.p0, risks.p1
    if p0 == 0 and p1 == 0:
        raise UndefinedEffectError("SVE is undefined when both risks are zero")
    value = _sve(p0, p1)
    return EffectEstimate(value, EffectKind.SVE, boundary=(p0 == 0 or p1 == 0))


def sve_hat(counts: TwoArmCounts) -> EffectEstimate:
    """Plug-in SVE from trial counts."""
    return sve_point(empirical_risks(counts))


def sve_bias_corrected(counts: TwoArmCounts) -> EffectEstimate:
    """Plug-in SVE minus its estimated second-order bias, clamped to [-1, 1]."""
    r = empirical_risks(counts)
    est = sve_point(r)
    p0, p1 = r.p0, r.p1
    if p0 > p1:
        value = est.value + p1 * (1.0 - p0) / (counts.n0 * p0 * p0)
    elif p1 > p0:
        value = est.value - p0 * (1.0 - p1) / (counts.n1 * p1 * p1)
    else:
        value = est.value
    value = min(1.0, max(-1.0, value))
    return EffectEstimate(value, EffectKind.SVE_BC, boundary=est.boundary)


def sve_from_theta(effect: RelativeEffect | float) -> EffectEstimate:
    """SVE for a multiplicative effect: ``(1 - theta) / max(1, theta)``."""
    theta = effect.theta_hat if isinstance(effect, RelativeEffect) else float(effect)
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    value = 1.0 - theta if theta <= 1.0 else 1.0 / theta - 1.0
    return EffectEstimate(value, EffectKind.SVE_FROM_THETA)


def theta_from_sve(s: float) -> float:
    """Inverse of :func:`sve_from_theta` on (-1, 1)."""
    if not -1.0 < s < 1.0:
        raise DomainError(f"SVE must lie strictly inside (-1, 1), got {s}")
    return 1.0 - s if s >= 0 else 1.0 / (1.0 + s)


def iso_effect_curve(s: float, points: int = 50) -> list[tuple[float, float]]:
    """Risk pairs ``(p0, p1)`` sharing SVE = s, for L'Abbe plots.

    ``p0`` runs over an evenly spaced interior grid of the range that keeps
    ``p1`` inside [0, 1]: all of (0, 1) when ``s >= 0`` and (0, 1 + s) when
    ``s < 0``.
    """
    if not -1.0 < s < 1.0:
        raise DomainError(f"SVE must lie strictly inside (-1, 1), got {s}")
    if points < 2:
        raise DomainError(f"need at least 2 points per curve, got {points}")
    top = 1.0 if s >= 0 else 1.0 + s
    return [(p0, iso_effect_p1(s, p0)) for p0 in (top * k / (points + 1)
                                                  for k in range(1, points + 1))]


def iso_effect_p1(s: float, p0: float) -> float:
    """Vaccinated-arm risk on the SVE = s iso-effect line through ``p0``."""
    if not -1.0 < s < 1.0:
        raise DomainError(f"SVE must lie strictly inside (-1, 1), got {s}")
    return (1.0 - s) * p0 if s >= 0 else p0 / (1.0 + s)
