import math

import numpy as np
import pytest

from symve import ConfigError, TwoArmCounts, profile_ci, wald_ci
from symve.config import load_config, parse_config
from symve.intervals import Method
from symve.simulation import (
    ROW_FIELDS,
    Scenario,
    desk_grid,
    draw_counts,
    null_type_i,
    full_grid,
    run_grid,
    run_scenario,
)


def test_scenario_validation():
    for kw in ({"p0": 0.0}, {"p1": 1.0}, {"n0": 0}, {"n1": 2.5}, {"replicates": 0},
               {"level": 1.0}, {"methods": ("bootstrap",)}, {"methods": ()}):
        args = dict(p0=0.2, p1=0.1, n0=10, n1=10)
        args.update(kw)
        with pytest.raises(ConfigError):
            Scenario(**args)
    sc = Scenario(0.2, 0.1, 10, 10, methods=("wald",))
    assert sc.methods == (Method.WALD,) and sc.true_sve == pytest.approx(0.5)


def test_grids():
    assert len(full_grid(replicates=10)) == 729
    desk = desk_grid(replicates=10)
    assert len(desk) == 50 and {s.n0 for s in desk} == {100, 1000}


def test_draws_deterministic_and_level_independent():
    a = draw_counts(Scenario(0.3, 0.2, 50, 60, replicates=100, master_seed=4))
    b = draw_counts(Scenario(0.3, 0.2, 50, 60, replicates=100, master_seed=4, level=0.8,
                             methods=("wald",)))
    c = draw_counts(Scenario(0.3, 0.2, 50, 60, replicates=100, master_seed=5))
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
    assert not np.array_equal(a[0], c[0])
    # more replicates extend the same stream
    d = draw_counts(Scenario(0.3, 0.2, 50, 60, replicates=150, master_seed=4))
    assert np.array_equal(d[0][:100], a[0])


def test_report_matches_scalar_recomputation():
    sc = Scenario(0.3, 0.15, 40, 50, replicates=300, master_seed=11, methods=("profile", "wald"))
    rep = run_scenario(sc)
    x0, x1 = draw_counts(sc)
    covered = {"profile": 0, "wald": 0}
    sves = []
    for a, b in zip(x0, x1):
        c = TwoArmCounts(int(a), sc.n0, int(b), sc.n1)
        covered["profile"] += sc.true_sve in profile_ci(c)
        covered["wald"] += sc.true_sve in wald_ci(c)
        sves.append(profile_ci(c).estimate)
    assert rep.defined == 300 and rep.undefined_count == 0
    assert rep.methods[Method.PROFILE].coverage == covered["profile"] / 300
    assert rep.methods[Method.WALD].coverage == covered["wald"] / 300
    assert rep.bias == pytest.approx(np.mean(sves) - sc.true_sve, abs=1e-12)
    assert rep.empirical_se == pytest.approx(np.std(sves, ddof=1), rel=1e-10)
    assert rep.type_i_error is None


def test_null_type_i_and_rows():
    sc = Scenario(0.2, 0.2, 30, 30, replicates=400, master_seed=2)
    t = null_type_i(sc)
    cov = run_scenario(sc).methods
    for m, v in t.items():
        assert v == pytest.approx(1 - cov[m].coverage)
    with pytest.raises(ConfigError):
        null_type_i(Scenario(0.2, 0.3, 30, 30, replicates=10))
    rows = run_scenario(sc).rows()
    assert [r["method"] for r in rows] == ["profile", "wald", "tanh-wald"]
    assert all(set(r) == set(ROW_FIELDS) for r in rows)


def test_undefined_replicates_excluded():
    rep = run_scenario(Scenario(0.01, 0.01, 5, 5, replicates=500, master_seed=1))
    assert rep.undefined_count > 0 and rep.defined + rep.undefined_count == 500


def test_run_grid_order_and_workers():
    scs = [Scenario(p, 0.2, 30, 30, replicates=50, master_seed=9) for p in (0.1, 0.3, 0.5)]
    one = run_grid(scs)
    two = run_grid(scs, workers=2)
    assert [r.scenario for r in one] == scs
    assert [r.rows() for r in one] == [r.rows() for r in two]
    with pytest.raises(ConfigError):
        run_grid([])


CONFIG = """\
master_seed = 17
replicates = 50
methods = ["wald"]

[grid]
p0 = [0.1, 0.2]
p1 = [0.3]
n = [20, 40]

[[scenario]]
p0 = 0.4
p1 = 0.4
n0 = 10
n1 = 12
level = 0.9
"""


def test_parse_config():
    scs = parse_config(CONFIG)
    assert len(scs) == 5
    assert [(s.p0, s.n0) for s in scs[:4]] == [(0.1, 20), (0.2, 20), (0.1, 40), (0.2, 40)]
    assert scs[-1].level == 0.9 and scs[-1].n1 == 12
    assert all(s.master_seed == 17 and s.replicates == 50 for s in scs)
    assert parse_config(CONFIG, master_seed=3)[0].master_seed == 3


@pytest.mark.parametrize("text, line", [
    ("replicates = 5\nbogus = 1\n[grid]\np0=[0.1]\np1=[0.1]\nn=[5]\n", 2),
    ("replicates = 5\n[grid]\np0=[0.1]\np1=[1.5]\nn=[5]\n", 2),
    ("[[scenario]]\np0 = 0.1\np1 = 0.2\nn = 10\n[[scenario]]\np0 = 0.1\nn = 10\n", 5),
    ("master_seed = -4\n[[scenario]]\np0 = 0.1\np1 = 0.2\nn = 10\n", 1),
    ("p0 = [\n", None),
])
def test_config_errors_have_locations(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text, source="x.toml")
    msg = str(info.value)
    assert msg.startswith("x.toml")
    if line is not None:
        assert msg.startswith(f"x.toml:{line}:")


def test_empty_and_missing_config(tmp_path):
    with pytest.raises(ConfigError):
        parse_config("replicates = 3\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    p = tmp_path / "c.toml"
    p.write_text(CONFIG)
    assert len(load_config(p)) == 5


def test_width_ratio_metric():
    rep = run_scenario(Scenario(0.1, 0.9, 1000, 1000, replicates=200, master_seed=1))
    assert rep.width_ratio > 10 and not math.isnan(rep.se_ratio)


@pytest.mark.slow
def test_full_grid_profile_coverage_band():
    # full design, 10000 replicates per scenario; opt in with -m slow
    reports = run_grid(full_grid(replicates=10000, master_seed=20240521, methods=("profile",)))
    cov = np.array([r.methods[Method.PROFILE].coverage for r in reports])
    assert len(cov) == 729
    assert cov.min() >= 0.93 and cov.max() <= 0.97, (cov.min(), cov.max())
