import csv
import io
import json
import math

import numpy as np
import pytest

from gnpx.extremes import top_m_common_neighbors
from gnpx.graph import sample_gnp
from gnpx.limits import gumbel_limit_cdf, normalization
from gnpx.montecarlo import (
    ExperimentConfig,
    default_y_grid,
    empirical_cdf,
    fit_gumbel,
    ks_distance,
    mix_seed,
    resolve_threads,
    run_experiment,
    run_trial,
    run_trials,
    summarize,
    trials_csv,
    write_outputs,
)


def small(**kw):
    base = dict(n=60, p=0.5, k=2, m=1, trials=12, master_seed=5, y_grid=default_y_grid())
    base.update(kw)
    return ExperimentConfig(**base)


def test_mix_seed_known_values():
    # SplitMix64 reference outputs for state 0: first two draws.
    assert mix_seed(0, 0) == 0xE220A8397B1DCDAF
    assert mix_seed(0, 1) == 0x6E789E6AA1B965F4
    seeds = {mix_seed(7, t) for t in range(10000)}
    assert len(seeds) == 10000
    assert all(0 <= s < 2**64 for s in seeds)


def test_default_grid():
    grid = default_y_grid()
    assert grid[0] == -2.0 and grid[-1] == 4.0 and len(grid) == 25


@pytest.mark.parametrize(
    "kw",
    [
        dict(trials=0),
        dict(y_grid=(0.0, 0.0)),
        dict(y_grid=(1.0, 0.0)),
        dict(y_grid=()),
        dict(k=60),
        dict(m=0),
        dict(p=1.0),
        dict(threads=0),
    ],
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        small(**kw)


def test_config_round_trip():
    cfg = small(threads="auto")
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({**cfg.to_dict(), "bogus": 1})


def test_resolve_threads_env(monkeypatch):
    monkeypatch.setenv("GNPX_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads("auto") >= 1
    assert resolve_threads(2) == 2


def test_run_is_deterministic():
    cfg = ExperimentConfig(n=200, p=0.5, k=1, m=1, trials=8, master_seed=1)
    assert run_experiment(cfg).to_json() == run_experiment(cfg).to_json()


def test_thread_count_does_not_change_results():
    a = run_experiment(small(threads=1))
    b = run_experiment(small(threads=4))
    assert a.to_json() == b.to_json()
    assert a.cdf_csv() == b.cdf_csv()


def test_forced_complete_graph_trial_values():
    # p = 1 has no normalization (sigma = 0); check the forced maxima directly.
    for t in range(3):
        g = sample_gnp(5, 1.0, mix_seed(0, t))
        assert top_m_common_neighbors(g, 2, 1).values == (3,)


def test_trial_records():
    cfg = small(k=3, m=3, n=40)
    params = normalization(40, 0.5, 3)
    for t in range(4):
        rec = run_trial(cfg, t)
        assert rec.seed_used == mix_seed(cfg.master_seed, t)
        assert list(rec.delta_values) == sorted(rec.delta_values, reverse=True)
        assert rec.normalized == tuple((d - params.a) / params.sigma for d in rec.delta_values)
        assert len(rec.gamma_exceedances) == 2


def test_k1_skips_gamma_counting():
    cfg = small(k=1, n=50)
    summary = run_experiment(cfg)
    assert summary.gamma_exceedance_rate is None
    assert run_trial(cfg, 0).gamma_exceedances == ()


def test_summary_shape_and_invariants():
    cfg = small(trials=20)
    records = run_trials(cfg)
    s = summarize(cfg, records)
    for col in (s.empirical_cdf, s.gumbel_cdf, s.janson_cdf):
        assert len(col) == len(cfg.y_grid)
        assert all(0 <= v <= 1 for v in col)
        assert all(a <= b for a, b in zip(col, col[1:]))
    assert 0 <= s.ks_vs_gumbel <= 1 and 0 <= s.ks_vs_janson <= 1
    assert s.ks_vs_gumbel == ks_distance(s.empirical_cdf, gumbel_limit_cdf, cfg.y_grid)
    params = normalization(cfg.n, cfg.p, cfg.k)
    for y, f in zip(cfg.y_grid, s.empirical_cdf):
        assert f == sum(r.normalized[0] <= y + 1e-12 for r in records) / len(records)
    assert s.gumbel_fit is not None


def test_m2_reports_only_gumbel():
    s = run_experiment(small(m=2))
    assert s.janson_cdf is None and s.ks_vs_janson is None and s.gumbel_fit is None
    assert s.gumbel_cdf[0] == gumbel_limit_cdf(-2.0, 2)


def test_ks_distance_examples():
    grid = [0.0, 1.0, 2.0]
    assert ks_distance([0.1, 0.5, 0.9], [0.1, 0.5, 0.9]) == 0
    assert ks_distance([0.0] * 3, [1.0] * 3) == 1
    assert ks_distance([0.4], [0.1]) == pytest.approx(0.3)
    assert ks_distance([0.0, 0.5, 1.0], lambda y: y / 2, grid) == 0
    with pytest.raises(ValueError):
        ks_distance([], [])
    with pytest.raises(ValueError):
        ks_distance([0.1], lambda y: y)


def test_empirical_cdf():
    assert empirical_cdf([1, 2, 2, 5], [0, 1, 2, 4.9, 5]) == (0.0, 0.25, 0.75, 0.75, 1.0)


def test_fit_gumbel_on_gumbel_samples():
    u = np.random.default_rng(12345).random(10**5)
    loc, scale = fit_gumbel(-np.log(-np.log(u)))
    assert -0.02 <= loc <= 0.02
    assert 0.98 <= scale <= 1.02


def test_fit_gumbel_errors():
    with pytest.raises(ValueError):
        fit_gumbel([1.0] * 20)
    with pytest.raises(ValueError):
        fit_gumbel([1.0, 2.0])


def test_fit_gumbel_affine_equivariance():
    x = np.random.default_rng(3).gumbel(size=500)
    loc, scale = fit_gumbel(x)
    loc2, scale2 = fit_gumbel(2.5 + 0.7 * x)
    assert loc2 == pytest.approx(2.5 + 0.7 * loc, rel=1e-12)
    assert scale2 == pytest.approx(0.7 * scale, rel=1e-12)


def test_outputs_on_disk(tmp_path):
    cfg = small(m=2, trials=5)
    records = run_trials(cfg)
    summary = summarize(cfg, records)
    write_outputs(summary, tmp_path, records)
    data = json.loads((tmp_path / "summary.json").read_text())
    assert set(data) == {
        "config",
        "normalization",
        "sampling_method",
        "y_grid",
        "empirical_cdf",
        "gumbel_cdf",
        "janson_cdf",
        "ks_vs_gumbel",
        "ks_vs_janson",
        "gumbel_fit",
        "gamma_exceedance_rate",
    }
    assert data["config"]["n"] == 60 and "threads" not in data["config"]
    rows = list(csv.reader(io.StringIO((tmp_path / "cdf.csv").read_text())))
    assert rows[0] == ["y", "empirical", "gumbel", "janson"]
    assert all(r[3] == "" for r in rows[1:])
    trows = list(csv.reader(io.StringIO((tmp_path / "trials.csv").read_text())))
    assert trows[0] == ["trial", "seed", "delta_1", "delta_2", "normalized_1", "normalized_2"]
    assert len(trows) == 6
    assert trials_csv(records, 2) == (tmp_path / "trials.csv").read_text()


def test_floats_round_trip_through_json():
    s = run_experiment(small(trials=6))
    data = json.loads(s.to_json())
    assert data["ks_vs_gumbel"] == s.ks_vs_gumbel
    assert data["normalization"]["sigma"] == s.normalization.sigma
    assert all(math.isclose(a, b, rel_tol=0) for a, b in zip(data["janson_cdf"], s.janson_cdf))
