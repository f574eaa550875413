"""Wald, tanh-Wald and profile-likelihood confidence intervals for SVE."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryError, DomainError, NumericError, UndefinedEffectError
from .estimands import (
    RelativeEffect,
    TwoArmCounts,
    empirical_risks,
    sve_from_theta,
    sve_point,
    ve_point,
)
from .likelihood import _loglik_arrays, lrt_arrays
from .numerics import BracketError, find_roots, guarded_atanh, guarded_tanh
from .quantiles import chi2_1_quantile, normal_quantile, two_sided_z
from .variance import atanh_variance, sve_variance, sve_variance_arrays, sve_variance_from_theta

__all__ = [
    "Method", "ConfidenceInterval", "ProfileDiagnosticWarning",
    "wald_ci", "tanh_wald_ci", "profile_ci", "theta_wald_ci", "theta_ci_transform",
    "ve_log_rr_ci", "sve_arrays", "wald_arrays", "tanh_wald_arrays", "profile_arrays_ci",
    "normal_quantile", "chi2_1_quantile",
]

SCAN_STEP = 0.01
EDGE = 1.0 - 1e-9
ENDPOINT_TOL = 1e-6


class Method(enum.Enum):
    WALD = "wald"
    TANH_WALD = "tanh-wald"
    PROFILE = "profile"
    # log relative-risk Wald interval for traditional VE; used as the comparator
    LOG_RR_WALD = "log-rr-wald"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, name: str | Method) -> Method:
        if isinstance(name, Method):
            return name
        key = name.strip().lower().replace("_", "-")
        for m in cls:
            if m.value == key:
                return m
        raise DomainError(f"unknown interval method {name!r}")


_LABELS = {
    Method.WALD: "Wald",
    Method.TANH_WALD: "tanh-Wald",
    Method.PROFILE: "Profile",
    Method.LOG_RR_WALD: "Wald (log RR)",
}


class ProfileDiagnosticWarning(UserWarning):
    """Lambda(s) crossed the threshold more than once in one scan direction."""


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: Method
    boundary_flags: tuple[bool, bool] = (False, False)
    estimate: float | None = None
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level}")
        if not self.lower <= self.upper:
            raise DomainError(f"lower {self.lower} exceeds upper {self.upper}")
        if self.method in (Method.TANH_WALD, Method.PROFILE):
            if not -1.0 <= self.lower <= self.upper <= 1.0:
                raise DomainError(f"{self.method.label} interval escapes [-1, 1]")

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _check_level(level: float):
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")


# ---------------------------------------------------------------------------
# vectorised kernels (used by the scalar API and by the simulator)


def sve_arrays(x0, n0, x1, n1) -> np.ndarray:
    """Plug-in SVE for arrays of counts; NaN where both arms have no events."""
    p0 = np.asarray(x0, dtype=float) / np.asarray(n0, dtype=float)
    p1 = np.asarray(x1, dtype=float) / np.asarray(n1, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(p0 >= p1, 1.0 - p1 / p0, p0 / p1 - 1.0)


def wald_arrays(x0, n0, x1, n1, level: float):
    z = two_sided_z(level)
    s = sve_arrays(x0, n0, x1, n1)
    half = z * np.sqrt(sve_variance_arrays(x0, n0, x1, n1))
    return s - half, s + half


def tanh_wald_arrays(x0, n0, x1, n1, level: float):
    """tanh-Wald endpoints; NaN where the estimate sits on +/-1."""
    z = two_sided_z(level)
    s = sve_arrays(x0, n0, x1, n1)
    var = sve_variance_arrays(x0, n0, x1, n1)
    inside = np.abs(s) < 1.0
    with np.errstate(invalid="ignore", divide="ignore"):
        s_in = np.where(inside, s, 0.0)
        u = np.arctanh(s_in)
        half = z * np.sqrt(var) / (1.0 - s_in * s_in)
        lo = np.where(inside, np.tanh(u - half), np.nan)
        hi = np.where(inside, np.tanh(u + half), np.nan)
    return lo, hi


def _one_side(x0, n0, x1, n1, s_hat, ll_max, thr, direction, step, edge, tol):
    """Scan outward from ``s_hat`` then bisect; returns (endpoint, at_boundary, multi)."""
    n_steps = int(math.ceil(2.0 * edge / step)) + 1
    k = np.arange(n_steps + 1, dtype=float)
    start = np.clip(s_hat, -edge, edge)
    grid = np.clip(start[:, None] + direction * step * k[None, :], -edge, edge)
    cols = [a[:, None] for a in (x0, n0, x1, n1, ll_max)]
    lam = lrt_arrays(cols[0], cols[1], cols[2], cols[3], grid, ll_max=cols[4])
    inside = lam <= thr
    # outermost grid point still inside the confidence set
    rev = inside[:, ::-1]
    j = n_steps - np.argmax(rev, axis=1)
    if not np.all(rev.any(axis=1)):
        bad = int(np.flatnonzero(~rev.any(axis=1))[0])
        raise NumericError("Lambda exceeds the threshold at the point estimate",
                           index=bad, s_hat=float(s_hat[bad]))
    rows = np.arange(len(s_hat))
    s_in = grid[rows, j]
    at_edge = direction * s_in >= edge
    gaps = np.cumsum(~inside, axis=1)
    multi = gaps[rows, j] > 0

    out = np.where(at_edge, direction * 1.0, np.nan)
    need = ~at_edge
    if np.any(need):
        idx = np.flatnonzero(need)
        s_out = grid[idx, j[idx] + 1]
        sub = [a[idx] for a in (x0, n0, x1, n1, ll_max)]

        def g(s):
            return lrt_arrays(sub[0], sub[1], sub[2], sub[3], s, ll_max=sub[4]) - thr

        try:
            out[idx] = find_roots(g, s_in[idx], s_out, tol=tol)
        except BracketError as exc:
            raise NumericError("profile endpoint bracketing failed", **exc.diagnostics) from exc
    return out, at_edge, multi


def profile_arrays_ci(x0, n0, x1, n1, level: float, *, step: float = SCAN_STEP,
                      edge: float = EDGE, tol: float = ENDPOINT_TOL, chunk: int = 1024):
    """Profile-likelihood CI endpoints for arrays of counts.

    Returns a dict of arrays: ``lower``, ``upper``, ``lower_boundary``,
    ``upper_boundary``, ``multiple_crossings``. Rows without any event get NaN
    endpoints.
    """
    _check_level(level)
    x0, n0, x1, n1 = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (x0, n0, x1, n1))
    x0, n0, x1, n1 = np.broadcast_arrays(x0, n0, x1, n1)
    size = x0.shape[0]
    thr = chi2_1_quantile(level)
    res = {
        "lower": np.full(size, np.nan),
        "upper": np.full(size, np.nan),
        "lower_boundary": np.zeros(size, dtype=bool),
        "upper_boundary": np.zeros(size, dtype=bool),
        "multiple_crossings": np.zeros(size, dtype=bool),
    }
    defined = np.flatnonzero((x0 + x1) > 0)
    for start in range(0, len(defined), chunk):
        idx = defined[start:start + chunk]
        a0, m0, a1, m1 = x0[idx], n0[idx], x1[idx], n1[idx]
        s_hat = sve_arrays(a0, m0, a1, m1)
        ll_max = _loglik_arrays(a0, m0, a1, m1, a0 / m0, a1 / m1)
        lo, lo_b, lo_m = _one_side(a0, m0, a1, m1, s_hat, ll_max, thr, -1.0, step, edge, tol)
        hi, hi_b, hi_m = _one_side(a0, m0, a1, m1, s_hat, ll_max, thr, 1.0, step, edge, tol)
        res["lower"][idx] = lo
        res["upper"][idx] = hi
        res["lower_boundary"][idx] = lo_b
        res["upper_boundary"][idx] = hi_b
        res["multiple_crossings"][idx] = lo_m | hi_m
    return res


# ---------------------------------------------------------------------------
# scalar API


def wald_ci(counts: TwoArmCounts, level: float = 0.95) -> ConfidenceInterval:
    """Original-scale Wald interval; deliberately not clipped to [-1, 1]."""
    _check_level(level)
    s = sve_point(empirical_risks(counts)).value
    half = two_sided_z(level) * sve_variance(counts).se
    return ConfidenceInterval(s - half, s + half, level, Method.WALD, estimate=s)


def tanh_wald_ci(counts: TwoArmCounts, level: float = 0.95) -> ConfidenceInterval:
    """Wald interval on the atanh scale, mapped back through tanh."""
    _check_level(level)
    s = sve_point(empirical_risks(counts)).value
    if abs(s) >= 1.0:
        raise BoundaryError(
            f"SVE estimate is {s:+g}; tanh-Wald is undefined on the boundary, "
            "use the profile method"
        )
    u = guarded_atanh(s)
    half = two_sided_z(level) * atanh_variance(counts).se
    return ConfidenceInterval(guarded_tanh(u - half), guarded_tanh(u + half), level,
                              Method.TANH_WALD, estimate=s)


def profile_ci(counts: TwoArmCounts, level: float = 0.95) -> ConfidenceInterval:
    """Profile-likelihood interval ``{s : Lambda(s) <= chi2_{1, level}}``.

    Scans outward from the estimate in steps of 0.01 up to +/-(1 - 1e-9) and
    bisects the outermost crossing to 1e-6. An endpoint whose scan never
    leaves the set is reported as +/-1 with its boundary flag set.
    """
    _check_level(level)
    if counts.total_events == 0:
        raise UndefinedEffectError("profile interval needs at least one event")
    s = sve_point(empirical_risks(counts)).value
    r = profile_arrays_ci(counts.x0, counts.n0, counts.x1, counts.n1, level)
    notes = ()
    if r["multiple_crossings"][0]:
        notes = ("likelihood ratio statistic is not monotone on one side of the estimate; "
                 "the outermost crossing was used",)
        warnings.warn(notes[0], ProfileDiagnosticWarning, stacklevel=2)
    lo, hi = float(r["lower"][0]), float(r["upper"][0])
    # the estimate always belongs to the set; guard against bisection round-off
    lo, hi = min(lo, s), max(hi, s)
    return ConfidenceInterval(lo, hi, level, Method.PROFILE,
                              boundary_flags=(bool(r["lower_boundary"][0]),
                                              bool(r["upper_boundary"][0])),
                              estimate=s, diagnostics=notes)


def ve_log_rr_ci(counts: TwoArmCounts, level: float = 0.95) -> ConfidenceInterval:
    """Traditional VE with a Wald interval for log relative risk."""
    _check_level(level)
    if counts.x0 == 0 or counts.x1 == 0:
        raise UndefinedEffectError("log relative risk interval needs events in both arms")
    r = empirical_risks(counts)
    ve = ve_point(r).value
    log_rr = math.log(r.p1 / r.p0)
    se = math.sqrt(1 / counts.x1 - 1 / counts.n1 + 1 / counts.x0 - 1 / counts.n0)
    z = two_sided_z(level)
    return ConfidenceInterval(1.0 - math.exp(log_rr + z * se), 1.0 - math.exp(log_rr - z * se),
                              level, Method.LOG_RR_WALD, estimate=ve)


def theta_wald_ci(effect: RelativeEffect, level: float = 0.95) -> ConfidenceInterval:
    _check_level(level)
    s = sve_from_theta(effect).value
    half = two_sided_z(level) * sve_variance_from_theta(effect).se
    return ConfidenceInterval(s - half, s + half, level, Method.WALD, estimate=s)


def theta_ci_transform(theta_lower: float, theta_upper: float) -> tuple[float, float]:
    """Map a confidence interval for theta to one for SVE, endpoint by endpoint."""
    if not (theta_lower > 0 and theta_upper > 0):
        raise DomainError(f"theta endpoints must be positive, got ({theta_lower}, {theta_upper})")
    if theta_lower > theta_upper:
        raise DomainError(f"theta_lower {theta_lower} exceeds theta_upper {theta_upper}")
    return sve_from_theta(theta_upper).value, sve_from_theta(theta_lower).value
