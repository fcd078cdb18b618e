import numpy as np
import pytest

from deepsp.harness import (
    DatasetSpec,
    SweepSpec,
    ValInstance,
    accuracy_eval,
    build_dataset,
    pearson,
    run_instance,
    sweep,
    train_model,
    write_runs_csv,
    write_sweep_csv,
    write_training_curve_csv,
)
from deepsp.mlp import TrainConfig, init_model, zero_model
from deepsp.sid import SidConfig
from deepsp.walksat import WalkSatConfig


# -- pearson --------------------------------------------------------------------


def test_pearson_perfect_correlation():
    xs = [1.0, 2.0, 3.0, 4.0]
    assert pearson(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0)
    assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0)


def test_pearson_matches_numpy():
    rng = np.random.default_rng(0)
    xs = rng.random(50)
    ys = 0.3 * xs + rng.random(50)
    assert pearson(xs, ys) == pytest.approx(np.corrcoef(xs, ys)[0, 1], abs=1e-12)


def test_pearson_errors():
    with pytest.raises(ValueError):
        pearson([1.0], [2.0])
    with pytest.raises(ValueError):
        pearson([1, 2, 3], [1, 2])
    with pytest.raises(ValueError):
        pearson([1, 2, 3], [5, 5, 5])  # zero variance


# -- dataset + training ----------------------------------------------------------


def tiny_spec(seed=1):
    return DatasetSpec(
        n=60,
        alpha_train=3.0,
        num_train_instances=3,
        alpha_val=3.0,
        num_val_instances=2,
        sid_cfg=SidConfig(
            t_max=128, walksat_cfg=WalkSatConfig(cutoff=20_000), rng_seed=0
        ),
        seed=seed,
    )


def test_build_dataset_shapes_and_determinism():
    X, T, val = build_dataset(tiny_spec())
    assert X.shape == (3 * 60, 4)
    assert T.shape == (180,)
    assert set(np.unique(T)) <= {0.0, 1.0}
    assert len(val) == 2
    assert all(isinstance(v, ValInstance) and v.features.shape == (60, 4) for v in val)
    X2, T2, val2 = build_dataset(tiny_spec())
    assert np.array_equal(X, X2) and np.array_equal(T, T2)
    assert all(np.array_equal(a.solution, b.solution) for a, b in zip(val, val2))


def test_build_dataset_scaled_counts():
    import dataclasses

    raw_X, _, raw_val = build_dataset(tiny_spec())
    spec = dataclasses.replace(tiny_spec(), scale_counts=True)
    X, _, val = build_dataset(spec)
    mean_degree = 3 * round(3.0 * 60) / 60
    np.testing.assert_allclose(X[:, 2:], raw_X[:, 2:] / mean_degree)
    np.testing.assert_array_equal(X[:, :2], raw_X[:, :2])
    np.testing.assert_allclose(
        val[0].features[:, 2:], raw_val[0].features[:, 2:] / mean_degree
    )


def test_build_dataset_runaway_failure_aborts(monkeypatch):
    import deepsp.harness as harness

    monkeypatch.setattr(harness, "_sid_samples", lambda *args: None)
    with pytest.raises(RuntimeError, match="runaway SID failure rate"):
        build_dataset(tiny_spec())


def test_build_dataset_majority_failure_aborts(monkeypatch):
    import deepsp.harness as harness

    # two failures per success: 67% failure rate, below the 80% runaway
    # guard but above the 50% overall limit checked at the end
    calls = [0]

    def flaky(n, alpha, seed, cfg, scale_counts=False):
        calls[0] += 1
        if calls[0] % 3:
            return None
        return np.zeros((n, 4)), np.zeros(n, dtype=bool)

    monkeypatch.setattr(harness, "_sid_samples", flaky)
    with pytest.raises(RuntimeError, match="exceeds 50%"):
        build_dataset(tiny_spec())


def test_accuracy_eval_bounds_and_distance():
    _, _, val = build_dataset(tiny_spec())
    m = init_model(rng_seed=0)
    acc = accuracy_eval(m, val)
    assert 0.0 <= acc <= 1.0
    assert accuracy_eval(m, val, as_distance=True) == pytest.approx(1.0 - acc)
    with pytest.raises(ValueError):
        accuracy_eval(m, [])


def test_train_model_tracks_validation():
    X, T, val = build_dataset(tiny_spec())
    model, hist = train_model(
        X, T, val, cfg=TrainConfig(epochs=2, rng_seed=0), eval_every=2, max_steps=6
    )
    steps = [row[0] for row in hist]
    assert steps[0] == 0 and steps[-1] == 6
    assert all(0.0 <= row[2] <= 1.0 for row in hist)


# -- sweep ------------------------------------------------------------------------


def small_sweep(filter="all"):
    return SweepSpec(
        n_list=[100],
        alpha_grid=[3.0, 4.6],
        instances_per_point=4,
        t_max=64,
        filter=filter,
        seed=2,
    )


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(alpha_grid=[4.5, 4.1])
    with pytest.raises(ValueError):
        SweepSpec(filter="weird")


def test_sweep_reports_and_aggregates():
    reports, aggs = sweep(small_sweep())
    assert len(reports) == 8
    assert len(aggs) == 2
    low, high = aggs
    assert low["alpha"] == 3.0 and low["instances"] == 4
    assert 0.0 <= low["nu"] <= high["nu"] <= 1.0
    # deterministic reruns (nan columns compare equal positionally)
    reports2, aggs2 = sweep(small_sweep())
    for a, b in zip(aggs, aggs2):
        assert a.keys() == b.keys()
        for k in a:
            np.testing.assert_equal(a[k], b[k])


def test_sweep_filters_change_selection_only():
    _, all_aggs = sweep(small_sweep("all"))
    _, conv_aggs = sweep(small_sweep("converged_only"))
    for a, c in zip(all_aggs, conv_aggs):
        assert a["nu"] == c["nu"]  # nu ignores the filter
        assert c["filtered"] <= a["filtered"]


def test_sweep_with_model_fills_solver_columns():
    spec = SweepSpec(
        n_list=[80], alpha_grid=[3.0], instances_per_point=2, t_max=64, seed=3
    )
    reports, aggs = sweep(spec, model=zero_model())
    assert all(np.isfinite(r.one_minus_rho) for r in reports)
    assert np.isfinite(aggs[0]["one_minus_rho_mean"])


def test_run_instance_without_model_leaves_nan():
    r = run_instance(50, 3.0, 1, t_max=64)
    assert np.isnan(r.one_minus_rho) and np.isnan(r.omega)
    assert r.converged and r.t_star >= 1


# -- CSV ---------------------------------------------------------------------------


def test_runs_csv_roundtrip(tmp_path):
    reports, aggs = sweep(small_sweep())
    runs = tmp_path / "runs.csv"
    swp = tmp_path / "sweep.csv"
    write_runs_csv(runs, reports)
    write_sweep_csv(swp, aggs)
    lines = runs.read_text().splitlines()
    assert lines[0] == "# deepsp-runs-v1"
    assert lines[1].startswith("instance_id,n,alpha,")
    assert len(lines) == 2 + len(reports)
    # appending to a matching file is allowed
    write_runs_csv(runs, reports[:1])
    assert len(runs.read_text().splitlines()) == 3 + len(reports)
    # wrong schema refuses
    with pytest.raises(ValueError):
        write_sweep_csv(runs, aggs)


def test_training_curve_csv(tmp_path):
    p = tmp_path / "curve.csv"
    write_training_curve_csv(p, [(0, float("nan"), 0.5), (10, 3.2, 0.6)])
    lines = p.read_text().splitlines()
    assert lines[0] == "# deepsp-curve-v1"
    assert lines[1] == "step,loss,val_accuracy"
    assert lines[3] == "10,3.2,0.6"
    with pytest.raises(ValueError):
        write_runs_csv(p, [])
