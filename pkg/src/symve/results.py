"""High-level estimate + interval calls and their tabular representation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal

from .datasets import TrialRecord
from .errors import DomainError
from .estimands import RelativeEffect, TwoArmCounts, sve_from_theta
from .intervals import (
    ConfidenceInterval,
    Method,
    profile_ci,
    tanh_wald_ci,
    theta_ci_transform,
    theta_wald_ci,
    ve_log_rr_ci,
    wald_ci,
)
from .numerics import guarded_atanh
from .quantiles import two_sided_z
from .variance import sve_variance_from_theta

FIELDS = ("estimate", "lower", "upper", "level", "method")


@dataclass(frozen=True)
class ResultRow:
    estimate: float
    lower: float
    upper: float
    level: float
    method: str

    @classmethod
    def from_interval(cls, ci: ConfidenceInterval, estimate: float | None = None) -> ResultRow:
        est = ci.estimate if estimate is None else estimate
        return cls(float(est), float(ci.lower), float(ci.upper), float(ci.level), ci.method.label)

    def as_dict(self) -> dict:
        return asdict(self)

    def formatted(self, digits: int = 2) -> list[str]:
        return [round_half_away(self.estimate, digits), round_half_away(self.lower, digits),
                round_half_away(self.upper, digits), round_half_away(self.level, digits),
                self.method]


def round_half_away(x: float, digits: int = 2) -> str:
    """Decimal string of ``x`` rounded half away from zero; never prints -0."""
    if not math.isfinite(x):
        return str(x)
    q = Decimal(1).scaleb(-digits)
    d = Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP)
    if d == 0:
        d = abs(d)
    return f"{d:.{digits}f}"


_CI = {
    Method.PROFILE: profile_ci,
    Method.WALD: wald_ci,
    Method.TANH_WALD: tanh_wald_ci,
}


def est_sve(x0: int, n0: int, x1: int, n1: int, method: str | Method = "profile",
            level: float = 0.95) -> ResultRow:
    """SVE estimate and interval from two-arm counts (profile method by default)."""
    m = Method.parse(method)
    if m not in _CI:
        raise DomainError(f"method {m.value!r} is not an SVE interval method")
    ci = _CI[m](TwoArmCounts(x0, n0, x1, n1), level)
    return ResultRow.from_interval(ci)


def sve_from_model(theta_hat: float, se_log_theta: float = 0.0, method: str | Method | None = None,
                   level: float = 0.95, theta_lower: float | None = None,
                   theta_upper: float | None = None) -> ResultRow:
    """SVE from a fitted relative effect (hazard ratio, rate ratio, ...).

    With ``theta_lower``/``theta_upper`` (an interval for theta at ``level``
    from the fitted model) the interval is mapped endpoint-wise; ``method``
    then only labels its provenance and defaults to profile. Without one,
    ``method`` must be ``wald`` (the default) or ``tanh-wald``, both built
    from ``se_log_theta``.
    """
    effect = RelativeEffect(theta_hat, se_log_theta)
    s = sve_from_theta(effect).value
    if (theta_lower is None) != (theta_upper is None):
        raise DomainError("theta_lower and theta_upper must be given together")
    if theta_lower is not None:
        m = Method.parse(method or "profile")
        lo, hi = theta_ci_transform(theta_lower, theta_upper)
        if not lo <= s <= hi:
            raise DomainError(f"theta interval ({theta_lower}, {theta_upper}) "
                              f"does not contain theta_hat={theta_hat}")
        return ResultRow(s, lo, hi, level, m.label)

    m = Method.parse(method or "wald")
    if m is Method.WALD:
        return ResultRow.from_interval(theta_wald_ci(effect, level))
    if m is Method.TANH_WALD:
        u = guarded_atanh(s)
        se_u = sve_variance_from_theta(effect).se / (1.0 - s * s)
        z = two_sided_z(level)
        return ResultRow(s, math.tanh(u - z * se_u), math.tanh(u + z * se_u), level, m.label)
    raise DomainError("a profile interval for a model-based effect needs the model's "
                      "theta interval (theta_lower, theta_upper)")


@dataclass(frozen=True)
class ReanalysisRow:
    category: str
    x1: int
    n1: int
    x0: int
    n0: int
    ve: ResultRow
    sve: ResultRow
    # published values differ from ours by more than rounding (VE columns only)
    ve_mismatch: bool = False


def reanalyze(records: list[TrialRecord], level: float = 0.95) -> list[ReanalysisRow]:
    out = []
    for rec in records:
        counts = rec.counts
        ve = ResultRow.from_interval(ve_log_rr_ci(counts, level))
        sve = ResultRow.from_interval(profile_ci(counts, level))
        mismatch = False
        if rec.published is not None and level == 0.95:
            pub = rec.published
            mismatch = any(
                abs(got - pub[key]) > 0.01 + 1e-9
                for got, key in ((ve.estimate, "ve"), (ve.lower, "ve_lower"),
                                 (ve.upper, "ve_upper"))
            )
        out.append(ReanalysisRow(rec.category, rec.x1, rec.n1, rec.x0, rec.n0, ve, sve, mismatch))
    return out
