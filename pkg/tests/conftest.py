"""Shared brute-force oracles.

These deliberately avoid the package's closed-form profile and its
scan/bisection inversion: they work from raw numpy logs on dense grids.
"""

import math

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def raw_loglik(x0, n0, x1, n1, p0, p1):
    """Binomial log-likelihood on arrays of risks, 0*log(0) handled by masking."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    out = np.zeros(np.broadcast(p0, p1).shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        for k, p in ((x0, p0), (x1, p1)):
            if k:
                out = out + k * np.log(p)
        for k, p in ((n0 - x0, p0), (n1 - x1, p1)):
            if k:
                out = out + k * np.log1p(-p)
    return out


def grid_profile(x0, n0, x1, n1, s, points=100_000, refine=True):
    """Profile log-likelihood by dense grid over the nuisance risk.

    Coarse grid of ``points`` interior values, then (optionally) a second
    grid of the same density inside the best coarse cell's neighbours.
    """
    c = 1.0 - abs(s)

    def ll(p):
        if s >= 0:
            return raw_loglik(x0, n0, x1, n1, p, c * p)
        return raw_loglik(x0, n0, x1, n1, c * p, p)

    step = 1.0 / (points + 1)
    grid = step * np.arange(1, points + 1)
    vals = ll(grid)
    i = int(np.nanargmax(vals))
    best = float(vals[i])
    if refine:
        lo = max(grid[i] - step, 1e-15)
        hi = min(grid[i] + step, 1.0 - 1e-15)
        fine = np.linspace(lo, hi, 20_001)
        best = max(best, float(np.nanmax(ll(fine))))
    return best


def golden_profile_vec(x0, n0, x1, n1, s, iters=80):
    """Profile log-likelihood for an array of s by vectorised golden section."""
    s = np.asarray(s, dtype=float)
    c = 1.0 - np.abs(s)
    pos = s >= 0

    def ll(p):
        p0 = np.where(pos, p, c * p)
        p1 = np.where(pos, c * p, p)
        return raw_loglik(x0, n0, x1, n1, p0, p1)

    r = (math.sqrt(5) - 1) / 2
    a = np.full_like(s, 1e-13)
    b = np.full_like(s, 1 - 1e-13)
    xc = b - r * (b - a)
    xd = a + r * (b - a)
    fc, fd = ll(xc), ll(xd)
    for _ in range(iters):
        left = fc >= fd
        b = np.where(left, xd, b)
        a = np.where(left, a, xc)
        new_c = b - r * (b - a)
        new_d = a + r * (b - a)
        xc, xd = np.where(left, new_c, xd), np.where(left, xc, new_d)
        fc, fd = np.where(left, ll(xc), fd), np.where(left, fc, ll(xd))
    ends = np.stack([ll(a), ll(b), fc, fd])
    return np.nanmax(ends, axis=0)


def grid_profile_ci(x0, n0, x1, n1, level=0.95, step=1e-4):
    """CI by evaluating Lambda on the s grid {-1+step, ..., 1-step}."""
    from scipy.stats import chi2

    thr = chi2.ppf(level, 1)
    s = np.arange(-1 + step, 1 - step / 2, step)
    p0, p1 = x0 / n0, x1 / n1
    ll_max = float(raw_loglik(x0, n0, x1, n1, p0, p1))
    lam = 2 * (ll_max - golden_profile_vec(x0, n0, x1, n1, s))
    inside = s[lam <= thr]
    return float(inside.min()), float(inside.max())


@pytest.fixture
def acceptance():
    def record(number, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def pytest_collection_modifyitems(items):
    # hypothesis-driven tests form the property suite
    for item in items:
        if getattr(getattr(item, "obj", None), "hypothesis", None) is not None:
            item.add_marker(pytest.mark.property)
