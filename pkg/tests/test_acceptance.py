"""Acceptance gate: each test carries the number of the criterion it checks.

Run ``pytest tests/test_acceptance.py`` and read the "acceptance criteria"
section at the end of the output for one PASS/FAIL line per criterion.
"""

import numpy as np
import pytest

from neurofuzzy.anfis import (
    TrainConfig,
    forward,
    loss,
    lse_consequents,
    predict,
    premise_gradient,
    train,
    training_rmse,
)
from neurofuzzy.fis import architecture_for_counts, grid_partition
from neurofuzzy.harness import (
    ExperimentConfig,
    SweepReport,
    load_model,
    render,
    run_experiment,
    save_model,
    sweep,
    synthetic_series,
)
from neurofuzzy.membership import FAMILIES
from neurofuzzy.metrics import evaluate, mape, rmse
from neurofuzzy.timeseries import Dataset, lag_embed

from oracles import (
    CONFIG_ROWS,
    HOLDOUT_ERROR,
    HOLDOUT_PREDICTED,
    HOLDOUT_TARGET,
    central_difference,
    sinc_product_grid,
    sugeno_output,
)

KINDS = sorted(FAMILIES)


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def perturbed_model(rng, n_inputs, counts, kind, n_samples=40, jitter=0.15):
    """Grid model over a random box with jittered premises and random consequents."""
    lo = rng.uniform(-5, 0, n_inputs)
    hi = lo + rng.uniform(2, 6, n_inputs)
    x = rng.uniform(lo, hi, (n_samples, n_inputs))
    fis = grid_partition(x, counts, kind)
    spacing = np.repeat((x.max(0) - x.min(0)) / (np.asarray(counts) - 1), [
        sum(mf.n_params for mf in v.mfs) for v in fis.inputs
    ])
    theta = fis.premise_vector() + jitter * spacing * rng.uniform(-1, 1, spacing.size)
    fis = fis.with_premise_vector(theta)
    return fis.with_consequents(rng.normal(size=fis.consequents.shape)), x


@criterion(1, "published hold-out RMSE and MAPE")
def test_ac1_metric_fixture():
    assert rmse(HOLDOUT_TARGET, HOLDOUT_PREDICTED) == pytest.approx(0.44886, abs=1e-4)
    assert mape(HOLDOUT_TARGET, HOLDOUT_PREDICTED) == pytest.approx(0.233839, abs=1e-4)


@criterion(2, "published hold-out error column")
def test_ac2_error_column():
    errors = evaluate(HOLDOUT_TARGET, HOLDOUT_PREDICTED).errors
    assert np.max(np.abs(errors - np.asarray(HOLDOUT_ERROR))) < 1e-6


@criterion(3, "architecture strings of the eleven published configurations")
def test_ac3_architecture_strings():
    got = [architecture_for_counts(counts) for _, counts, _ in CONFIG_ROWS]
    assert got == [
        "4:119:1", "4:174:1", "5:107:1", "5:229:1", "5:156:1", "4:40:1",
        "5:156:1", "5:74:1", "5:74:1", "5:74:1", "4:82:1",
    ]


def well_inside(fis, x, margin=1e-3):
    """Samples away from every kink, with healthy total firing."""
    keep = np.ones(len(x), dtype=bool)
    for j, var in enumerate(fis.inputs):
        xj = np.clip(x[:, j], var.lo, var.hi)
        keep &= (x[:, j] > var.lo + margin) & (x[:, j] < var.hi - margin)
        for mf in var.mfs:
            for k in mf.kinks():
                keep &= np.abs(xj - k) > margin
            if mf.kind == "gbell":
                keep &= np.abs(xj - mf.center) > margin
    for i in np.flatnonzero(keep):
        keep[i] = forward(fis, x[i])[1].firing.sum() > 1e-3
    return keep


def well_separated(fis, margin=1e-3):
    for var in fis.inputs:
        for mf in var.mfs:
            if mf.kind in ("triangular", "trapezoidal") and np.min(np.diff(mf.params)) < margin:
                return False
    return True


@criterion(4, "analytic premise gradient against central differences")
def test_ac4_gradient_correctness():
    rng = np.random.default_rng(2024)
    checked = 0
    worst = 0.0
    while checked < 120:
        kind = KINDS[checked % len(KINDS)]
        n_inputs = int(rng.integers(2, 4))
        counts = tuple(int(c) for c in rng.integers(2, 4, n_inputs))
        fis, x = perturbed_model(rng, n_inputs, counts, kind, n_samples=25)
        keep = well_inside(fis, x)
        if keep.sum() < 10 or not well_separated(fis):
            continue
        x = x[keep]
        ds = Dataset(x, predict(fis, x) + rng.normal(0, 1.0, len(x)))
        theta = fis.premise_vector()
        h = 1e-6 * np.maximum(1.0, np.abs(theta))
        numeric = central_difference(lambda v: loss(fis.with_premise_vector(v), ds), theta, h)
        analytic = premise_gradient(fis, ds)
        abs_err = np.abs(analytic - numeric)
        rel_err = abs_err / np.maximum(np.abs(numeric), 1e-300)
        ok = (rel_err < 1e-5) | (abs_err < 1e-8)
        assert ok.all(), f"{kind} {counts}: worst relative error {rel_err[~ok].max():.3g}"
        large = np.abs(numeric) > 1e-3
        if large.any():
            worst = max(worst, float(rel_err[large].max()))
        checked += 1
    print(f"\n{checked} models, worst relative error on partials above 1e-3: {worst:.3g}")


@criterion(5, "least squares recovers a generating model in one hybrid epoch")
@pytest.mark.parametrize("kind", KINDS)
def test_ac5_lse_exact(kind):
    rng = np.random.default_rng(11)
    generator, x = perturbed_model(rng, 2, (2, 3), kind, n_samples=80)
    ds = Dataset(x, predict(generator, x))
    start = generator.with_consequents(np.zeros_like(generator.consequents))
    fitted, history = train(start, ds, TrainConfig(epochs=1))
    assert history.rmse[0] < 1e-8
    assert training_rmse(fitted, ds) < 1e-8


@criterion(5, "least squares recovers a generating model in one hybrid epoch")
@pytest.mark.parametrize("kind", KINDS)
def test_ac5_residual_orthogonal(kind):
    rng = np.random.default_rng(12)
    fis, x = perturbed_model(rng, 3, (2, 2, 2), kind, n_samples=120)
    y = np.sin(x).sum(axis=1) + rng.normal(0, 0.3, len(x))
    result = lse_consequents(fis, Dataset(x, y))
    a, r = result.design, result.residual
    assert np.linalg.norm(a.T @ r) <= 1e-6 * np.linalg.norm(a) * np.linalg.norm(r)


def synthetic_lag_data(lags, seed=0):
    return lag_embed(synthetic_series(seed=seed), lags)


@criterion(6, "post-LSE RMSE never exceeds pre-LSE RMSE")
@pytest.mark.parametrize(
    "case",
    ["sinc-gaussian", "sinc-triangular", "series-gbell", "series-trapezoidal"],
)
def test_ac6_hybrid_monotone(case):
    source, kind = case.split("-")
    if source == "sinc":
        x, y = sinc_product_grid()
        ds, counts = Dataset(x, y), (3, 3)
    else:
        ds, counts = synthetic_lag_data(3), (2, 2, 2)
    fis = grid_partition(ds, counts, kind)
    _, history = train(fis, ds, TrainConfig(epochs=50, initial_step=0.05))
    assert len(history.rmse) == len(history.pre_lse_rmse) == 50
    post, pre = np.array(history.rmse), np.array(history.pre_lse_rmse)
    assert np.all(post <= pre), f"violations at epochs {np.flatnonzero(post > pre) + 1}"


@criterion(7, "product-sinc approximation benchmark")
def test_ac7_sinc_benchmark():
    x, y = sinc_product_grid()
    ds = Dataset(x, y)
    fis = grid_partition(ds, (4, 4), "gaussian")
    # the step is an absolute premise displacement; the grid spans 20 units per input
    _, history = train(fis, ds, TrainConfig(epochs=100, initial_step=0.1))
    print(f"\nsinc training RMSE after 100 epochs: {history.final_rmse:.6g}")
    assert history.final_rmse < 0.05


@criterion(8, "end-to-end synthetic forecasting pipeline")
def test_ac8_pipeline():
    cfg = ExperimentConfig(mf_type="gaussian", mf_counts=2, lags=5, epochs=650, split_date="2015-04", seed=0)
    result = run_experiment(cfg)
    rec = result.record
    print(f"\ntrain RMSE {rec.train_rmse:.6g}  test RMSE {rec.test_rmse:.6g}  test MAPE {rec.test_mape:.6g}%")
    assert rec.ok
    assert len(result.test_targets) == 9
    assert rec.architecture == "5:74:1"
    assert rec.test_mape < 1.0
    report = render(SweepReport([rec]), "csv")
    assert ",5:74:1," in report


@criterion(9, "normalized firing sums to one and matches the closed form")
def test_ac9_normalization():
    rng = np.random.default_rng(99)
    pairs = 0
    while pairs < 10_000:
        kind = KINDS[int(rng.integers(len(KINDS)))]
        n_inputs = int(rng.integers(1, 4))
        counts = tuple(int(c) for c in rng.integers(2, 4, n_inputs))
        fis, x = perturbed_model(rng, n_inputs, counts, kind, n_samples=20, jitter=0.3)
        # include inputs outside the variable ranges, which are clamped for fuzzification
        probes = np.vstack([x, x + rng.normal(0, 3.0, x.shape)])
        for row in probes:
            out, trace = forward(fis, row)
            if trace.floored:
                continue
            expected, _ = sugeno_output(fis, row)
            assert abs(trace.normalized.sum() - 1.0) <= 1e-9
            assert abs(out - expected) <= 1e-10
            pairs += 1


@criterion(10, "model file round trip and deterministic reports")
def test_ac10_round_trip(tmp_path):
    ds = synthetic_lag_data(5)
    fis = grid_partition(ds, (2,) * 5, "gbell")
    with pytest.warns(RuntimeWarning, match="ridge"):
        fis, _ = train(fis, ds, TrainConfig(epochs=30))
    path = tmp_path / "model.json"
    save_model(path, fis, lags=5)
    loaded, meta = load_model(path)
    probe = np.random.default_rng(5).uniform(ds.rows.min(), ds.rows.max(), (100, 5))
    assert meta["lags"] == 5
    assert np.max(np.abs(predict(loaded, probe) - predict(fis, probe))) < 1e-12


@criterion(10, "model file round trip and deterministic reports")
@pytest.mark.parametrize("fmt", ["markdown", "csv"])
def test_ac10_byte_identical_reports(fmt):
    grid = {"mf_type": ["gaussian", "triangular"], "mf_counts": [2, 3], "lags": 3, "epochs": [30, 40], "seed": 3}
    first = render(sweep(grid), fmt).encode()
    second = render(sweep(grid), fmt).encode()
    assert first == second
