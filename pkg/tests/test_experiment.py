import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lastexit.config import ExperimentConfig, apply_overrides, load_config, parse_config
from lastexit.covariance import ExpPower
from lastexit.errors import ConfigInvalid, TooFewSamples
from lastexit.experiment import (
    GumbelFitReport,
    convergence_report,
    gumbel_fit,
    load_reports,
    read_exit_csv,
    run_campaign,
)
from lastexit.scaling import gumbel_limit_ppf, scaling_constants

C1 = 0.398942280401432678
R_MED_C1 = -0.552425612623008415


def limit_sample(n, c, seed):
    u = np.random.default_rng(seed).uniform(size=n)
    return -np.log(-np.log(u) / c)


def test_fit_on_exact_sampler():
    fit = gumbel_fit(limit_sample(10_000, C1, 0), C1)
    assert fit.ks_distance < 0.0163
    assert fit.quantiles["0.5"] == pytest.approx(R_MED_C1, abs=0.05)
    assert list(fit.quantiles) == ["0.1", "0.25", "0.5", "0.75", "0.9"]


def test_fit_point_mass():
    fit = gumbel_fit(np.full(100, math.log(C1)), C1)
    assert fit.ks_distance == pytest.approx(1 - math.exp(-1), rel=1e-12)


def test_fit_needs_fifty():
    with pytest.raises(TooFewSamples):
        gumbel_fit(np.zeros(49), C1)
    gumbel_fit(np.zeros(50), C1)


def test_fit_quantiles_of_limit():
    x = np.array([gumbel_limit_ppf((k + 0.5) / 2000, C1) for k in range(2000)])
    fit = gumbel_fit(x, C1)
    assert fit.ks_distance == pytest.approx(0.5 / 2000, rel=1e-6)


def report(eps, ks, median, c=C1, n=1000):
    return GumbelFitReport(eps=eps, n_paths=n, n_effective=n, n_nocross=0, n_censored=0,
                           ks_distance=ks, quantiles={} if median is None else {"0.5": median},
                           c_used=c, A=0.0, B=1.0, t_max=1.0, step=0.1, n_grid=11,
                           embedding_size=32, clip_fraction=0.0)


def test_convergence_report_sorting_and_gates():
    s = convergence_report([report(0.05, 0.05, -0.5), report(0.2, 0.06, -0.9), report(0.1, 0.07, -0.7)])
    assert s.r_med == pytest.approx(R_MED_C1, rel=1e-14)
    assert [r.eps for r in s.rows] == [0.2, 0.1, 0.05]
    assert s.rows[0].median_shift == pytest.approx(-0.9 - R_MED_C1)
    assert s.trend_ok and s.final_ok and s.passed
    assert "PASS" in s.table().splitlines()[-1]


def test_convergence_report_failures():
    up = convergence_report([report(0.2, 0.03, 0.0), report(0.1, 0.06, 0.0)])
    assert up.trend_ok is False and not up.passed
    high = convergence_report([report(0.2, 0.2, 0.0), report(0.1, 0.1, 0.0)])
    assert high.trend_ok and not high.final_ok and not high.passed
    missing = convergence_report([report(0.2, None, None), report(0.1, 0.01, 0.0)])
    assert missing.trend_ok is False


def test_convergence_single_row():
    s = convergence_report([report(0.1, 0.05, -0.5)])
    assert len(s.rows) == 1 and s.trend_ok is None and s.passed
    assert "n/a" in s.table()
    with pytest.raises(ValueError):
        convergence_report([])


@given(st.floats(1e-6, 0.5), st.floats(-50, 50))
def test_normalization_shift(eps, r):
    sc = scaling_constants(ExpPower(1, 1, 1), eps)
    T = sc.A + r * sc.B
    assert sc.normalize(T + sc.B) == pytest.approx(sc.normalize(T) + 1, abs=1e-9)


def small_config(tmp_path, **kw):
    args = dict(model=ExpPower(1, 1, 1), eps_list=(0.3, 0.2), n_paths=300, master_seed=99,
                output_dir=str(tmp_path))
    args.update(kw)
    return ExperimentConfig(**args)


def test_campaign_accounting(tmp_path):
    cfg = small_config(tmp_path / "a", n_paths=100, eps_list=(0.3,))
    (res,) = run_campaign(cfg).results
    r = res.report
    assert r.n_effective + r.n_nocross + r.n_censored == 100
    assert r.ks_distance is not None and 0 <= r.ks_distance <= 1
    rows = read_exit_csv(tmp_path / "a" / "eps_0.3.csv")
    assert [row[0] for row in rows] == list(range(100))
    crossed = [row for row in rows if row[1] == "CROSSED"]
    assert len(crossed) == r.n_effective
    for _, _, T, rn in crossed:
        assert rn == pytest.approx((T - r.A) / r.B, rel=1e-12, abs=1e-12)
    assert np.allclose(res.r_norm, [row[3] for row in crossed])


def test_campaign_files_are_deterministic(tmp_path):
    one = run_campaign(small_config(tmp_path / "one"), workers=1)
    two = run_campaign(small_config(tmp_path / "two"), workers=2)
    for name in ("eps_0.3.csv", "eps_0.2.csv", "summary.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()
    meta = json.loads((tmp_path / "two" / "metadata.json").read_text())
    assert meta["workers"] == 2 and "wall_clock_s" in meta
    reports, echo = load_reports(tmp_path / "one")
    assert reports == one.reports == two.reports
    assert echo["model"]["family"] == "exp_power"
    assert "output_dir" not in echo["run"]


def test_campaign_path_dump(tmp_path):
    from lastexit.simulate import read_path_dump

    cfg = small_config(tmp_path, n_paths=100, eps_list=(0.3,), dump_paths=True)
    (res,) = run_campaign(cfg).results
    values, step = read_path_dump(tmp_path / "paths_0.3.bin")
    assert values.shape == (100, res.report.n_grid)
    assert step == res.report.step


def test_config_validation():
    m = ExpPower(1, 1, 1)
    for bad in (dict(eps_list=()), dict(eps_list=(0.1, 0.2)), dict(eps_list=(1.0,)),
                dict(n_paths=99), dict(delta_tail=0.5), dict(eta=0.0), dict(workers=0)):
        args = dict(model=m, eps_list=(0.2, 0.1), n_paths=100, master_seed=1)
        args.update(bad)
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(**args)
    with pytest.raises(ConfigInvalid):
        ExperimentConfig(model=ExpPower(1, 1, 1.5), eps_list=(0.1,), n_paths=100, master_seed=1)
    ExperimentConfig(model=ExpPower(1, 1, 1.5), eps_list=(0.1,), n_paths=100, master_seed=1, H_alpha=0.8)


CONFIG_TEXT = """
[model]
family = "exp_power"
v = 1.0
q = 1.0
alpha = 1.0

[run]
eps_list = [0.2, 0.1]
n_paths = 200
master_seed = 5
"""


def test_load_config_and_overrides(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text(CONFIG_TEXT)
    cfg = load_config(f, ["run.n_paths=400", "model.alpha=2", "run.output_dir=out"])
    assert cfg.n_paths == 400 and cfg.model.alpha == 2.0 and cfg.output_dir == "out"
    assert cfg.eps_list == (0.2, 0.1)
    with pytest.raises(ConfigInvalid):
        load_config(f, ["run.nonsense=1"])
    with pytest.raises(ConfigInvalid):
        load_config(f, ["n_paths=1"])
    with pytest.raises(ConfigInvalid):
        load_config(tmp_path / "missing.toml")
    with pytest.raises(ConfigInvalid):
        parse_config({"model": {"family": "matern", "v": 1, "q": 1, "alpha": 1}, "run": {}})


def test_overrides_do_not_mutate():
    data = {"run": {"n_paths": 1}}
    out = apply_overrides(data, ["run.n_paths=2", "run.eps_list=[0.3, 0.1]"])
    assert data == {"run": {"n_paths": 1}}
    assert out["run"] == {"n_paths": 2, "eps_list": [0.3, 0.1]}
