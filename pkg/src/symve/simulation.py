"""Monte Carlo operating characteristics of SVE estimators and intervals.

Each scenario draws its two arms from independent Philox streams keyed by
the master seed and a hash of the scenario's risks and arm sizes, so results
do not depend on the order scenarios are run in, on the number of worker
processes, or on the confidence level and methods requested.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .estimands import RiskPair, sve_point
from .intervals import Method, profile_arrays_ci, sve_arrays, tanh_wald_arrays, wald_arrays
from .numerics import RngSeed, binomial_draws, stream_id
from .quantiles import two_sided_z
from .variance import sve_variance_arrays

FULL_RISKS = tuple(round(0.1 * k, 1) for k in range(1, 10))
FULL_SIZES = (100, 250, 1000)
DESK_RISKS = (0.1, 0.3, 0.5, 0.7, 0.9)
DESK_SIZES = (100, 1000)
DEFAULT_METHODS = (Method.PROFILE, Method.WALD, Method.TANH_WALD)


@dataclass(frozen=True)
class Scenario:
    p0: float
    p1: float
    n0: int
    n1: int
    replicates: int = 2000
    level: float = 0.95
    methods: tuple[Method, ...] = DEFAULT_METHODS
    master_seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.p0 < 1.0 and 0.0 < self.p1 < 1.0):
            raise ConfigError(f"risks must lie in (0, 1), got p0={self.p0}, p1={self.p1}")
        if int(self.n0) != self.n0 or int(self.n1) != self.n1 or self.n0 < 1 or self.n1 < 1:
            raise ConfigError(f"arm sizes must be positive integers, got n0={self.n0}, n1={self.n1}")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ConfigError(f"replicates must be a positive integer, got {self.replicates}")
        if not 0.0 < self.level < 1.0:
            raise ConfigError(f"level must lie in (0, 1), got {self.level}")
        try:
            methods = tuple(Method.parse(m) for m in self.methods)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if not methods or Method.LOG_RR_WALD in methods:
            raise ConfigError("methods must be a nonempty subset of profile, wald, tanh-wald")
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "n0", int(self.n0))
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "replicates", int(self.replicates))

    @property
    def true_sve(self) -> float:
        return sve_point(RiskPair(self.p0, self.p1)).value

    @property
    def is_null(self) -> bool:
        return self.p0 == self.p1

    def arm_seeds(self) -> tuple[RngSeed, RngSeed]:
        key = (float(self.p0), float(self.p1), self.n0, self.n1)
        return (RngSeed(self.master_seed, stream_id("arm0", *key)),
                RngSeed(self.master_seed, stream_id("arm1", *key)))


@dataclass(frozen=True)
class MethodResult:
    coverage: float
    type_i_error: float | None
    mean_width: float
    # replicates whose interval could not be formed (scored as non-covering)
    failures: int = 0
    # profile intervals whose scan saw more than one threshold crossing
    nonmonotone: int = 0


@dataclass(frozen=True)
class SimulationReport:
    scenario: Scenario
    true_sve: float
    defined: int
    undefined_count: int
    bias: float
    bias_bc: float
    empirical_se: float
    mean_estimated_se: float
    mean_width_ve: float
    mean_width_sve: float
    ve_undefined_count: int
    methods: dict = field(default_factory=dict)

    @property
    def se_ratio(self) -> float:
        return self.mean_estimated_se / self.empirical_se if self.empirical_se > 0 else math.nan

    @property
    def width_ratio(self) -> float:
        return self.mean_width_ve / self.mean_width_sve if self.mean_width_sve > 0 else math.nan

    @property
    def type_i_error(self) -> dict | None:
        if not self.scenario.is_null:
            return None
        return {m: r.type_i_error for m, r in self.methods.items()}

    def rows(self) -> list[dict]:
        """One flat record per method, in the order the methods were requested."""
        sc = self.scenario
        base = {
            "p0": sc.p0, "p1": sc.p1, "n0": sc.n0, "n1": sc.n1,
            "replicates": sc.replicates, "level": sc.level, "master_seed": sc.master_seed,
            "true_sve": self.true_sve, "defined": self.defined,
            "undefined_count": self.undefined_count,
            "bias": self.bias, "bias_bc": self.bias_bc,
            "empirical_se": self.empirical_se, "mean_estimated_se": self.mean_estimated_se,
            "se_ratio": self.se_ratio,
            "mean_width_ve": self.mean_width_ve, "mean_width_sve": self.mean_width_sve,
            "width_ratio": self.width_ratio, "ve_undefined_count": self.ve_undefined_count,
        }
        out = []
        for m, r in self.methods.items():
            row = dict(base)
            row.update(method=m.value, coverage=r.coverage, type_i_error=r.type_i_error,
                       mean_width=r.mean_width, failures=r.failures, nonmonotone=r.nonmonotone)
            out.append(row)
        return out


ROW_FIELDS = (
    "p0", "p1", "n0", "n1", "replicates", "level", "master_seed", "method",
    "true_sve", "defined", "undefined_count", "coverage", "type_i_error", "mean_width",
    "failures", "nonmonotone", "bias", "bias_bc", "empirical_se", "mean_estimated_se",
    "se_ratio", "mean_width_ve", "mean_width_sve", "width_ratio", "ve_undefined_count",
)


def draw_counts(sc: Scenario) -> tuple[np.ndarray, np.ndarray]:
    g0, g1 = (s.generator() for s in sc.arm_seeds())
    return (binomial_draws(sc.n0, sc.p0, sc.replicates, g0),
            binomial_draws(sc.n1, sc.p1, sc.replicates, g1))


def sve_bc_arrays(x0, n0, x1, n1) -> np.ndarray:
    """Vectorised bias-corrected SVE, clamped to [-1, 1]."""
    p0 = np.asarray(x0, dtype=float) / n0
    p1 = np.asarray(x1, dtype=float) / n1
    s = sve_arrays(x0, n0, x1, n1)
    with np.errstate(invalid="ignore", divide="ignore"):
        up = p1 * (1.0 - p0) / (n0 * p0 * p0)
        down = p0 * (1.0 - p1) / (n1 * p1 * p1)
    corr = np.where(p0 > p1, up, np.where(p1 > p0, -down, 0.0))
    return np.clip(s + corr, -1.0, 1.0)


def ve_log_rr_width_arrays(x0, n0, x1, n1, level: float) -> np.ndarray:
    """Width of the log-RR Wald interval for VE; NaN when an arm has no events."""
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    ok = (x0 > 0) & (x1 > 0)
    z = two_sided_z(level)
    with np.errstate(invalid="ignore", divide="ignore"):
        rr = (x1 / n1) / (x0 / n0)
        se = np.sqrt(1 / x1 - 1 / n1 + 1 / x0 - 1 / n0)
        # VE = 1 - RR, so the VE interval is (1 - RR e^{z se}, 1 - RR e^{-z se})
        width = rr * (np.exp(z * se) - np.exp(-z * se))
    return np.where(ok, width, np.nan)


def _interval_arrays(method: Method, x0, n0, x1, n1, level):
    if method is Method.PROFILE:
        r = profile_arrays_ci(x0, n0, x1, n1, level)
        return r["lower"], r["upper"], r["multiple_crossings"]
    if method is Method.WALD:
        lo, hi = wald_arrays(x0, n0, x1, n1, level)
    else:
        lo, hi = tanh_wald_arrays(x0, n0, x1, n1, level)
    return lo, hi, np.zeros(len(lo), dtype=bool)


def run_scenario(sc: Scenario) -> SimulationReport:
    x0_all, x1_all = draw_counts(sc)
    ok = (x0_all + x1_all) > 0
    x0, x1 = x0_all[ok], x1_all[ok]
    n_def = int(ok.sum())
    truth = sc.true_sve

    s = sve_arrays(x0, sc.n0, x1, sc.n1)
    s_bc = sve_bc_arrays(x0, sc.n0, x1, sc.n1)
    se_hat = np.sqrt(sve_variance_arrays(x0, sc.n0, x1, sc.n1))
    nan = math.nan

    methods = {}
    widths = {}
    for m in sc.methods:
        lo, hi, multi = _interval_arrays(m, x0, sc.n0, x1, sc.n1, sc.level)
        finite = np.isfinite(lo) & np.isfinite(hi)
        covered = finite & (lo <= truth) & (truth <= hi)
        excludes_zero = finite & ((lo > 0) | (hi < 0))
        w = (hi - lo)[finite]
        widths[m] = float(w.mean()) if w.size else nan
        methods[m] = MethodResult(
            coverage=float(covered.sum() / n_def) if n_def else nan,
            # an interval that cannot be formed is counted as a rejection
            type_i_error=(float((excludes_zero | ~finite).sum() / n_def) if n_def else nan)
            if sc.is_null else None,
            mean_width=widths[m],
            failures=int((~finite).sum()),
            nonmonotone=int(multi.sum()),
        )

    ve_w = ve_log_rr_width_arrays(x0, sc.n0, x1, sc.n1, sc.level)
    ve_ok = np.isfinite(ve_w)
    sve_width_method = Method.PROFILE if Method.PROFILE in widths else sc.methods[0]

    return SimulationReport(
        scenario=sc,
        true_sve=truth,
        defined=n_def,
        undefined_count=sc.replicates - n_def,
        bias=float(s.mean() - truth) if n_def else nan,
        bias_bc=float(s_bc.mean() - truth) if n_def else nan,
        empirical_se=float(s.std(ddof=1)) if n_def > 1 else nan,
        mean_estimated_se=float(se_hat.mean()) if n_def else nan,
        mean_width_ve=float(ve_w[ve_ok].mean()) if ve_ok.any() else nan,
        mean_width_sve=widths[sve_width_method],
        ve_undefined_count=int((~ve_ok).sum()),
        methods=methods,
    )


def run_grid(scenarios: list[Scenario], workers: int = 1) -> list[SimulationReport]:
    """Run scenarios, optionally across worker processes; output order follows input."""
    scenarios = list(scenarios)
    if not scenarios:
        raise ConfigError("run_grid needs at least one scenario")
    if workers <= 1 or len(scenarios) == 1:
        return [run_scenario(sc) for sc in scenarios]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_scenario, scenarios))


def null_type_i(sc: Scenario) -> dict[Method, float]:
    """Rejection rate of H0: SVE = 0 for each method, in a null scenario."""
    if not sc.is_null:
        raise ConfigError(f"type I error needs p0 == p1, got p0={sc.p0}, p1={sc.p1}")
    report = run_scenario(sc)
    return {m: r.type_i_error for m, r in report.methods.items()}


def grid(risks0, risks1, sizes0, sizes1, **kwargs) -> list[Scenario]:
    return [Scenario(p0, p1, n0, n1, **kwargs)
            for n0, n1, p0, p1 in itertools.product(sizes0, sizes1, risks0, risks1)]


def full_grid(replicates: int = 10000, **kwargs) -> list[Scenario]:
    """The full 9 x 9 risk by 3 x 3 size design (729 scenarios, arm sizes crossed)."""
    return grid(FULL_RISKS, FULL_RISKS, FULL_SIZES, FULL_SIZES,
                replicates=replicates, **kwargs)


def desk_grid(replicates: int = 2000, **kwargs) -> list[Scenario]:
    """Reduced design for quick checks: 5 x 5 risks, balanced arms of 100 and 1000."""
    out = []
    for n in DESK_SIZES:
        out += grid(DESK_RISKS, DESK_RISKS, (n,), (n,), replicates=replicates, **kwargs)
    return out
