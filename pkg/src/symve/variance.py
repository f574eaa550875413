"""Delta-method variances of the SVE estimator on three scales."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryError, DomainError, UndefinedEffectError
from .estimands import RelativeEffect, TwoArmCounts, empirical_risks, sve_point


class Scale(enum.Enum):
    ORIGINAL = "original"
    ATANH = "atanh"
    THETA = "theta"


@dataclass(frozen=True)
class VarianceEstimate:
    value: float
    scale: Scale
    # set when an arm has zero events; the delta method gives no coverage guarantee there
    boundary: bool = False

    def __post_init__(self):
        if not (self.value >= 0 and math.isfinite(self.value)):
            raise DomainError(f"variance must be finite and nonnegative, got {self.value}")

    @property
    def se(self) -> float:
        return math.sqrt(self.value)


@dataclass(frozen=True)
class ArmVariance:
    sigma0_sq: float
    sigma1_sq: float


def arm_variances(counts: TwoArmCounts) -> ArmVariance:
    r = empirical_risks(counts)
    return ArmVariance(r.p0 * (1.0 - r.p0) / counts.n0, r.p1 * (1.0 - r.p1) / counts.n1)


def sve_variance_arrays(x0, n0, x1, n1) -> np.ndarray:
    """Vectorised plug-in variance; NaN where both arms have zero events."""
    x0, n0, x1, n1 = (np.asarray(a, dtype=float) for a in (x0, n0, x1, n1))
    p0 = x0 / n0
    p1 = x1 / n1
    s0 = p0 * (1.0 - p0) / n0
    s1 = p1 * (1.0 - p1) / n1
    m = np.maximum(p0, p1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return (p1 * p1 * s0 + p0 * p0 * s1) / m**4


def sve_variance(counts: TwoArmCounts) -> VarianceEstimate:
    r"""Plug-in delta-method variance of the SVE estimator.

    .. math:: \widehat{Var} = (\hat p_1^2 \hat\sigma_0^2 + \hat p_0^2 \hat\sigma_1^2) / \max(\hat p_0, \hat p_1)^4

    with :math:`\hat\sigma_j^2 = \hat p_j (1 - \hat p_j) / n_j`. The single-max
    form equals the two-case version on either side of the diagonal.
    """
    r = empirical_risks(counts)
    m = max(r.p0, r.p1)
    if m == 0:
        raise UndefinedEffectError("variance is undefined when both arms have zero events")
    av = arm_variances(counts)
    value = (r.p1 * r.p1 * av.sigma0_sq + r.p0 * r.p0 * av.sigma1_sq) / m**4
    return VarianceEstimate(value, Scale.ORIGINAL, boundary=(counts.x0 == 0 or counts.x1 == 0))


def atanh_variance(counts: TwoArmCounts) -> VarianceEstimate:
    """Variance of ``atanh(SVE_hat)`` by the delta method."""
    s = sve_point(empirical_risks(counts)).value
    if abs(s) >= 1.0:
        raise BoundaryError(
            f"SVE estimate {s:+g} is on the boundary; the atanh-scale variance diverges"
        )
    v = sve_variance(counts)
    return VarianceEstimate(v.value / (1.0 - s * s) ** 2, Scale.ATANH, boundary=v.boundary)


def sve_variance_from_theta(effect: RelativeEffect) -> VarianceEstimate:
    """Variance of SVE derived from a relative effect, via the log scale."""
    theta = effect.theta_hat
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    var_log = effect.se_log_theta**2
    if theta == 1.0:
        return VarianceEstimate(var_log, Scale.THETA)
    k = max(theta, 1.0 / theta)
    return VarianceEstimate(var_log / (k * k), Scale.THETA)
