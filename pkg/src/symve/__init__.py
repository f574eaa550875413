"""Symmetric vaccine efficacy: point estimates, intervals and simulation tools."""

from .errors import (
    BoundaryError,
    BracketError,
    ConfigError,
    DomainError,
    NumericError,
    SVEError,
    UndefinedEffectError,
)
from .estimands import (
    EffectEstimate,
    EffectKind,
    RelativeEffect,
    RiskPair,
    TwoArmCounts,
    empirical_risks,
    sve_bias_corrected,
    sve_from_theta,
    sve_hat,
    sve_point,
    theta_from_sve,
    ve_point,
)
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
from .likelihood import loglik, lrt_statistic, profile_loglik
from .quantiles import chi2_1_quantile, normal_quantile
from .results import ResultRow, est_sve, sve_from_model
from .variance import atanh_variance, sve_variance, sve_variance_from_theta

__version__ = "0.1.0"
