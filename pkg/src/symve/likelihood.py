"""Binomial log-likelihood, the SVE profile likelihood and the LRT statistic.

For a fixed SVE value ``s`` the constraint ties the two risks together as
``p_scaled = c * p_lead`` with ``c = 1 - |s|``; the lead arm is arm 0 when
``s >= 0`` and arm 1 otherwise. The constrained log-likelihood is concave in
``p_lead`` and its stationarity condition is the quadratic

    c N p^2 - [X (1 + c) + (n_lead - x_lead) + c (n_scaled - x_scaled)] p + X = 0

(``X`` and ``N`` pooled events and size), whose smaller root is the unique
maximizer on ``(0, 1]``. The default solver evaluates that root directly; the
``"golden"`` solver maximizes numerically and is kept as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlog1py, xlogy

from .errors import DomainError, NumericError, UndefinedEffectError
from .estimands import RiskPair, TwoArmCounts, empirical_risks
from .numerics import OptimizerConfig, maximize_scalar

NUISANCE_EPS = 1e-12
LAMBDA_CLAMP = 1e-8


@dataclass(frozen=True)
class ProfilePoint:
    s: float
    loglik: float
    nuisance: float

    @property
    def risks(self) -> RiskPair:
        if self.s >= 0:
            return RiskPair(self.nuisance, self.nuisance * (1.0 - self.s))
        return RiskPair(self.nuisance * (1.0 + self.s), self.nuisance)


@dataclass(frozen=True)
class LrtStatistic:
    value: float
    s: float

    # the glossary calls it lambda; keep the name available
    @property
    def lam(self) -> float:
        return self.value


def _xlogy(x: float, p: float) -> float:
    if x == 0:
        return 0.0
    if p <= 0.0:
        return -math.inf
    return x * math.log(p)


def _xlog1m(k: float, p: float) -> float:
    if k == 0:
        return 0.0
    if p >= 1.0:
        return -math.inf
    return k * math.log1p(-p)


def loglik(counts: TwoArmCounts, risks: RiskPair) -> float:
    """Two-arm binomial log-likelihood (without the binomial coefficients).

    Terms of the form ``0 * log 0`` are taken as zero; a risk of 0 with events,
    or 1 with non-events, gives ``-inf``.
    """
    return (_xlogy(counts.x0, risks.p0) + _xlog1m(counts.n0 - counts.x0, risks.p0)
            + _xlogy(counts.x1, risks.p1) + _xlog1m(counts.n1 - counts.x1, risks.p1))


def max_loglik(counts: TwoArmCounts) -> float:
    return loglik(counts, empirical_risks(counts))


def _loglik_arrays(x0, n0, x1, n1, p0, p1):
    return xlogy(x0, p0) + xlog1py(n0 - x0, -p0) + xlogy(x1, p1) + xlog1py(n1 - x1, -p1)


def profile_arrays(x0, n0, x1, n1, s):
    """Vectorised exact profile: returns ``(loglik, nuisance)`` arrays.

    All inputs broadcast; ``s`` must lie in (-1, 1).
    """
    x0, n0, x1, n1, s = (np.asarray(a, dtype=float) for a in (x0, n0, x1, n1, s))
    pos = s >= 0
    c = 1.0 - np.abs(s)
    xa = np.where(pos, x0, x1)
    na = np.where(pos, n0, n1)
    xb = np.where(pos, x1, x0)
    nb = np.where(pos, n1, n0)
    X = xa + xb
    N = na + nb
    B = X * (1.0 + c) + (na - xa) + c * (nb - xb)
    disc = np.maximum(B * B - 4.0 * c * N * X, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(X > 0, 2.0 * X / (B + np.sqrt(disc)), 0.0)
    p = np.minimum(p, 1.0)
    q = c * p
    ll = xlogy(xa, p) + xlog1py(na - xa, -p) + xlogy(xb, q) + xlog1py(nb - xb, -q)
    return ll, p


def _check_s(s: float):
    if not -1.0 < s < 1.0:
        raise DomainError(f"SVE value must lie strictly inside (-1, 1), got {s}")


def profile_loglik(
    counts: TwoArmCounts,
    s: float,
    solver: str = "exact",
    cfg: OptimizerConfig | None = None,
) -> ProfilePoint:
    """Log-likelihood maximized over the nuisance risk subject to SVE = s.

    ``solver="exact"`` uses the closed-form stationary point; ``"golden"``
    runs :func:`~symve.numerics.maximize_scalar` over ``(1e-12, 1 - 1e-12)``.
    """
    _check_s(s)
    if solver == "exact":
        ll, p = profile_arrays(counts.x0, counts.n0, counts.x1, counts.n1, s)
        return ProfilePoint(float(s), float(ll), float(p))
    if solver != "golden":
        raise DomainError(f"unknown solver {solver!r}")

    c = 1.0 - abs(s)
    if s >= 0:
        def objective(p):
            return loglik(counts, RiskPair(p, c * p))
    else:
        def objective(p):
            return loglik(counts, RiskPair(c * p, p))
    p, ll = maximize_scalar(objective, NUISANCE_EPS, 1.0 - NUISANCE_EPS, cfg)
    if not math.isfinite(ll):
        raise NumericError("profile maximization found no finite value", s=s, counts=counts)
    return ProfilePoint(float(s), ll, p)


def _finish_lambda(lam, s):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < -LAMBDA_CLAMP):
        i = int(np.argmin(lam))
        raise NumericError("negative likelihood ratio statistic",
                           lam=float(lam.flat[i]), s=float(np.broadcast_to(s, lam.shape).flat[i]))
    return np.maximum(lam, 0.0)


def lrt_arrays(x0, n0, x1, n1, s, ll_max=None) -> np.ndarray:
    """Vectorised Lambda(s) = 2 {l(p0_hat, p1_hat) - l_p(s)}."""
    x0, n0, x1, n1 = (np.asarray(a, dtype=float) for a in (x0, n0, x1, n1))
    if ll_max is None:
        ll_max = _loglik_arrays(x0, n0, x1, n1, x0 / n0, x1 / n1)
    ll, _ = profile_arrays(x0, n0, x1, n1, s)
    return _finish_lambda(2.0 * (ll_max - ll), s)


def lrt_statistic(counts: TwoArmCounts, s: float, solver: str = "exact") -> LrtStatistic:
    """Likelihood ratio statistic for H0: SVE = s."""
    if counts.total_events == 0:
        raise UndefinedEffectError("the LRT needs at least one event across both arms")
    point = profile_loglik(counts, s, solver=solver)
    lam = 2.0 * (max_loglik(counts) - point.loglik)
    return LrtStatistic(float(_finish_lambda(lam, s)), float(s))
