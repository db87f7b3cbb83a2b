import numpy as np
import pytest

from ordr2 import gof
from ordr2.errors import DegenerateDiscretizationError
from ordr2.estimation import fit_clm
from ordr2.io import load_csv, save_csv
from ordr2.simulation import (
    AGG_HEADER,
    ROW_HEADER,
    Setting,
    SimConfig,
    aggregate,
    discretize,
    gen_latent,
    penalty_table,
    replication_streams,
    run_experiment,
    run_replication,
    with_full_scale,
)


def _by_measure(rows, r=None):
    return {row.measure: row for row in rows if r is None or row.r == r}


def test_zero_noise_limit():
    d = gen_latent("a", 50, 0.0, np.random.default_rng(0))
    assert np.array_equal(d.y, d.X @ np.array([1.0, 2.0]))


def test_latent_moments_setting_a():
    d = gen_latent("a", 1_000_000, 1.0, np.random.default_rng(1))
    assert np.var(d.X @ [1.0, 2.0]) == pytest.approx(5 / 12, abs=0.01)


def test_setting_b_layout():
    d = gen_latent("b", 20_000, 1.0, np.random.default_rng(2))
    assert d.names == ("x1", "x2", "x3", "x4", "x5")
    assert np.all(d.X[:, 3:] >= 0) and np.all(d.X[:, 3:] <= 1)
    assert np.std(d.X[:, :3], axis=0) == pytest.approx([1, 1, 1], abs=0.03)
    assert Setting.MIXED.beta == pytest.approx([0, -1 / 3, -2 / 3, -1, 1, 2])


def test_generation_is_deterministic():
    a = gen_latent("b", 100, 2.0, replication_streams(7, "b", 100, 2.0, 3)[0])
    b = gen_latent("b", 100, 2.0, replication_streams(7, "b", 100, 2.0, 3)[0])
    assert a.X.tobytes() == b.X.tobytes() and a.y.tobytes() == b.y.tobytes()
    c = gen_latent("b", 100, 2.0, replication_streams(7, "b", 100, 2.0, 4)[0])
    assert not np.array_equal(a.y, c.y)


def test_discretize_examples():
    assert discretize([1, 2, 3, 4], 2).tolist() == [1, 1, 2, 2]
    assert discretize([10, 20, 30], 3).tolist() == [1, 2, 3]
    assert discretize([4, 3, 2, 1], 2).tolist() == [2, 2, 1, 1]


def test_discretize_equal_frequencies():
    y = np.random.default_rng(3).standard_normal(100_000)
    freq = np.bincount(discretize(y, 5))[1:] / len(y)
    assert freq == pytest.approx([0.2] * 5, abs=0.01)


def test_discretize_counts_balanced_for_continuous():
    y = np.random.default_rng(4).uniform(size=103)
    for r in range(2, 11):
        counts = np.bincount(discretize(y, r))[1:]
        assert len(counts) == r and counts.min() > 0
        assert counts.max() - counts.min() <= 1


def test_discretize_degenerate():
    with pytest.raises(DegenerateDiscretizationError):
        discretize([1.0] * 8 + [2.0], 3)
    with pytest.raises(DegenerateDiscretizationError):
        discretize([1.0, 2.0], 3)


def test_binary_identity_rows():
    cfg = SimConfig(n_grid=(200,), r_grid=(2,), replications=3, seed=11)
    for rep in range(3):
        rows = _by_measure(run_replication(cfg, 200, 1.0, 2, rep))
        mf = rows["mf"].value
        for k in range(1, 7):
            assert rows[f"ug:l{k}"].value == pytest.approx(1 - (1 - mf) ** 2, abs=1e-12)
        assert rows["delta:mf"].value == pytest.approx(mf - rows["ols"].value)
        assert "tj" in rows


def test_noise_covariates_enter_fit_only():
    base = SimConfig(n_grid=(300,), r_grid=(3,), replications=1, seed=5)
    noisy = SimConfig(n_grid=(300,), r_grid=(3,), replications=1, seed=5, noise_covariates=5)
    a = _by_measure(run_replication(base, 300, 1.0, 3, 0))
    b = _by_measure(run_replication(noisy, 300, 1.0, 3, 0))
    assert a["ols"].value == b["ols"].value
    assert b["mf"].value > a["mf"].value  # nested model with extra columns


def test_replication_refit_oracle(tmp_path):
    cfg = SimConfig(n_grid=(500,), r_grid=(2,), replications=1, seed=2024)
    rows = _by_measure(run_replication(cfg, 500, 1.0, 2, 0))
    latent = gen_latent("a", 500, 1.0, replication_streams(2024, "a", 500, 1.0, 0)[0])
    path = tmp_path / "rep.csv"
    save_csv(latent.with_response(discretize(latent.y, 2), "ordinal"), path, "y")
    refit = fit_clm(load_csv(path, "y", "binary"), "probit")
    assert rows["mf"].value == gof.r2_mcfadden(refit.loglik, refit.null_loglik)


def test_latent_data_shared_across_r_and_grid():
    small = SimConfig(n_grid=(100,), sigma_grid=(1.0,), r_grid=(2,), replications=2, seed=9)
    big = SimConfig(n_grid=(100, 500), sigma_grid=(1.0, 3.0), r_grid=(2, 5), replications=2, seed=9)
    a = [r for r in run_experiment(small).rows if r.measure == "ols"]
    b = [r for r in run_experiment(big).rows if r.measure == "ols" and r.n == 100 and r.sigma == 1.0]
    assert [(r.rep, r.value) for r in a] == [(r.rep, r.value) for r in b if r.r == 2]
    assert [r.value for r in b if r.r == 2] == [r.value for r in b if r.r == 5]


def test_single_replication_aggregate_equals_rows():
    cfg = SimConfig(n_grid=(120,), r_grid=(2, 4), replications=1, seed=1)
    res = run_experiment(cfg)
    for rec in res.aggregate:
        setting, n, sigma, r, measure, mean, sd, count = rec
        row = next(x for x in res.rows if x.r == r and x.measure == measure)
        assert mean == row.value and sd == 0.0 and count == 1


def test_determinism_independent_of_workers():
    cfg = SimConfig(n_grid=(80,), sigma_grid=(1.0, 2.0), r_grid=(2, 3), replications=4, seed=3)
    serial = run_experiment(cfg, workers=1)
    parallel = run_experiment(cfg, workers=2)
    assert serial.rows_csv() == parallel.rows_csv()
    assert serial.aggregate_csv() == parallel.aggregate_csv()
    assert serial.aggregate_csv() == run_experiment(cfg).aggregate_csv()


def test_ols_decreases_with_sigma():
    cfg = SimConfig(n_grid=(200,), sigma_grid=(1.0, 2.0, 3.0, 4.0), r_grid=(2,), replications=20, seed=8)
    res = run_experiment(cfg)
    means = [res.mean("ols", sigma=s) for s in cfg.sigma_grid]
    assert all(b < a for a, b in zip(means, means[1:]))


def test_flagged_rows_excluded_from_aggregate():
    from ordr2.simulation import SimResultRow

    rows = [SimResultRow("a", 10, 1.0, 2, 0, "mf", 0.2), SimResultRow("a", 10, 1.0, 2, 1, "mf", 0.9, "nonconverged"),
            SimResultRow("a", 10, 1.0, 2, 2, "mf", 0.4)]
    ((*_, mean, sd, count),) = aggregate(rows)
    assert mean == pytest.approx(0.3) and count == 2 and sd == pytest.approx(np.std([0.2, 0.4], ddof=1))


def test_csv_headers():
    res = run_experiment(SimConfig(n_grid=(60,), replications=1, seed=0))
    assert res.rows_csv().splitlines()[0] == ",".join(ROW_HEADER)
    assert res.aggregate_csv().splitlines()[0] == ",".join(AGG_HEADER)
    assert ROW_HEADER == ("setting", "n", "sigma", "r", "rep", "measure", "value", "flag")
    assert AGG_HEADER == ("setting", "n", "sigma", "r", "measure", "mean", "sd", "count")


def test_config_validation_and_full_scale():
    with pytest.raises(ValueError):
        SimConfig(r_grid=(1,))
    with pytest.raises(ValueError):
        SimConfig(sigma_grid=(0.0,))
    with pytest.raises(ValueError):
        SimConfig(replications=0)
    cfg = with_full_scale(SimConfig())
    assert cfg.replications == 1000 and cfg.n_grid == (100, 500, 1000) and cfg.sigma_grid == (1, 2, 3, 4)
    assert SimConfig().replications == 200


def test_penalty_table_rows():
    table = penalty_table(10)
    assert len(table) == 6 * 9
    assert all(v == 2.0 for pid, r, v in table if r == 2)
    assert all(v == r for pid, r, v in table if pid == "l1")
    assert dict(((pid, r), v) for pid, r, v in table)[("l6", 4)] == pytest.approx(4.8284, abs=1e-4)
