import numpy as np
import pytest

from neurofuzzy.anfis import (
    FIRING_FLOOR,
    StepSizeSchedule,
    TrainConfig,
    consequent_gradient,
    design_matrix,
    forward,
    loss,
    lse_consequents,
    predict,
    premise_gradient,
    solve_least_squares,
    train,
    training_rmse,
)
from neurofuzzy.errors import ConfigurationError, ShapeError
from neurofuzzy.fis import FuzzyVariable, SugenoFis, grid_partition
from neurofuzzy.membership import Gaussian, Triangular
from neurofuzzy.timeseries import Dataset

from oracles import central_difference, sugeno_output


def random_model(rng, n_inputs=2, counts=None, kind="gaussian", n=30):
    counts = counts or (2,) * n_inputs
    x = rng.uniform(-2, 3, (n, n_inputs))
    fis = grid_partition(x, counts, kind)
    fis = fis.with_consequents(rng.normal(size=fis.consequents.shape))
    return fis, x


def generated_dataset(seed=0, n=50, counts=(2, 2)):
    rng = np.random.default_rng(seed)
    generator, x = random_model(rng, len(counts), counts, n=n)
    return generator, Dataset(x, predict(generator, x))


class TestForward:
    def test_single_rule_is_its_consequent(self):
        for mf in (Gaussian(0, 1), Triangular(-5, 0, 5)):
            var = FuzzyVariable("x1", (-10, 10), (mf,))
            fis = SugenoFis((var,), np.array([[0]]), np.array([[2.0, 1.0]]))
            out, trace = forward(fis, [3.0])
            assert out == pytest.approx(7.0)
            np.testing.assert_allclose(trace.normalized, [1.0])

    def test_symmetric_pair_averages(self):
        var = FuzzyVariable("x1", (-10, 10), (Gaussian(-2, 1.5), Gaussian(4, 1.5)))
        fis = SugenoFis((var,), np.array([[0], [1]]), np.array([[0.0, 5.0], [0.0, 11.0]]))
        out, trace = forward(fis, [1.0])
        np.testing.assert_allclose(trace.normalized, [0.5, 0.5], atol=1e-15)
        assert out == pytest.approx(8.0)

    @pytest.mark.parametrize("kind", ["gaussian", "gbell", "triangular", "trapezoidal"])
    def test_matches_direct_oracle(self, kind):
        rng = np.random.default_rng(7)
        for _ in range(20):
            fis, x = random_model(rng, 3, (2, 3, 2), kind)
            for row in x[:5]:
                expected, _ = sugeno_output(fis, row)
                out, trace = forward(fis, row)
                assert out == pytest.approx(expected, abs=1e-10)
                assert trace.normalized.sum() == pytest.approx(1.0, abs=1e-12)
                assert trace.weighted.sum() == pytest.approx(out, abs=1e-12)
                assert len(trace.memberships) == 3

    def test_batch_equals_single(self):
        rng = np.random.default_rng(1)
        fis, x = random_model(rng, 2)
        np.testing.assert_allclose(predict(fis, x), [forward(fis, r)[0] for r in x], rtol=0, atol=1e-13)

    def test_rule_order_irrelevant(self):
        rng = np.random.default_rng(2)
        fis, x = random_model(rng, 3, (2, 2, 3))
        perm = rng.permutation(fis.n_rules)
        shuffled = SugenoFis(fis.inputs, fis.antecedents[perm], fis.consequents[perm])
        np.testing.assert_allclose(predict(shuffled, x), predict(fis, x), atol=1e-12)

    def test_inputs_clamped_for_fuzzification_only(self):
        var = FuzzyVariable("x1", (0, 1), (Gaussian(0, 0.5), Gaussian(1, 0.5)))
        fis = SugenoFis((var,), np.array([[0], [1]]), np.array([[1.0, 0.0], [2.0, 0.0]]))
        _, at_edge = forward(fis, [1.0])
        out, beyond = forward(fis, [3.0])
        np.testing.assert_array_equal(at_edge.normalized, beyond.normalized)
        assert out == pytest.approx(3.0 * (at_edge.normalized @ [1.0, 2.0]))

    def test_floor_flagged(self):
        var = FuzzyVariable("x1", (0, 10), (Triangular(0, 0.1, 0.2), Triangular(9.8, 9.9, 10)))
        fis = SugenoFis((var,), np.array([[0], [1]]), np.array([[1.0, 1.0], [1.0, 1.0]]))
        out, trace = forward(fis, [5.0])
        assert trace.floored and out == 0.0
        assert not forward(fis, [0.1])[1].floored

    def test_arity_mismatch(self):
        fis, _ = random_model(np.random.default_rng(0), 2)
        with pytest.raises(ShapeError):
            forward(fis, [1.0, 2.0, 3.0])
        with pytest.raises(ShapeError):
            predict(fis, np.zeros((4, 3)))


class TestLeastSquares:
    def test_recovers_generating_model(self):
        generator, ds = generated_dataset()
        start = generator.with_consequents(np.zeros_like(generator.consequents))
        fit = lse_consequents(start, ds)
        assert fit.rmse < 1e-8
        assert not fit.rank_deficient
        np.testing.assert_allclose(fit.fis.consequents, generator.consequents, atol=1e-6)

    def test_single_rule_line(self):
        x = np.linspace(-3, 4, 12)[:, None]
        var = FuzzyVariable("x1", (-3, 4), (Gaussian(0, 2),))
        fis = SugenoFis((var,), np.array([[0]]))
        fit = lse_consequents(fis, Dataset(x, 3 * x[:, 0] + 2))
        np.testing.assert_allclose(fit.fis.consequents, [[3.0, 2.0]], atol=1e-10)

    def test_residual_orthogonal_to_design(self):
        rng = np.random.default_rng(5)
        fis, x = random_model(rng, 2, (3, 2), n=60)
        ds = Dataset(x, np.sin(x[:, 0]) + x[:, 1] ** 2 + rng.normal(0, 0.1, 60))
        fit = lse_consequents(fis, ds)
        assert fit.rmse > 0.01
        lhs = np.abs(fit.design.T @ fit.residual)
        assert np.all(lhs <= 1e-6 * np.linalg.norm(fit.design, axis=0) * np.linalg.norm(fit.residual))

    def test_design_matrix_layout(self):
        rng = np.random.default_rng(3)
        fis, x = random_model(rng, 2)
        a = design_matrix(fis, x)
        assert a.shape == (x.shape[0], fis.n_rules * 3)
        np.testing.assert_allclose(a @ fis.consequents.ravel(), predict(fis, x), atol=1e-12)

    def test_underdetermined_is_flagged_and_finite(self):
        rng = np.random.default_rng(4)
        fis, x = random_model(rng, 2, (3, 3), n=10)
        fit = lse_consequents(fis, Dataset(x, rng.normal(size=10)))
        assert fit.rank_deficient
        assert np.all(np.isfinite(fit.fis.consequents))

    def test_solver_matches_numpy_when_well_posed(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(40, 6))
        y = rng.normal(size=40)
        theta, flagged = solve_least_squares(a, y)
        assert not flagged
        np.testing.assert_allclose(theta, np.linalg.lstsq(a, y, rcond=None)[0], atol=1e-12)


class TestPremiseGradient:
    def test_zero_on_exact_data(self):
        generator, ds = generated_dataset(1)
        np.testing.assert_allclose(premise_gradient(generator, ds), 0.0, atol=1e-12)

    @pytest.mark.parametrize("kind", ["gaussian", "gbell", "triangular", "trapezoidal"])
    def test_finite_differences(self, kind):
        rng = np.random.default_rng(11)
        fis, x = random_model(rng, 2, (2, 2), kind, n=10)
        # off-grid parameters so piecewise families are not sitting on data points
        fis = fis.with_premise_vector(fis.premise_vector() + rng.normal(0, 0.05, fis.premise_vector().size))
        ds = Dataset(x, rng.normal(size=10))
        theta = fis.premise_vector()
        numeric = central_difference(lambda v: loss(fis.with_premise_vector(v), ds), theta, 1e-6)
        analytic = premise_gradient(fis, ds)
        np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-8)

    def test_duplicated_samples_double(self):
        rng = np.random.default_rng(12)
        fis, x = random_model(rng, 2, (2, 3))
        ds = Dataset(x, rng.normal(size=x.shape[0]))
        doubled = Dataset(np.vstack([x, x]), np.concatenate([ds.targets, ds.targets]))
        np.testing.assert_allclose(premise_gradient(fis, doubled), 2 * premise_gradient(fis, ds), rtol=1e-12)

    def test_consequent_gradient_finite_differences(self):
        rng = np.random.default_rng(13)
        fis, x = random_model(rng, 2, (2, 2))
        ds = Dataset(x, rng.normal(size=x.shape[0]))
        shape = fis.consequents.shape
        numeric = central_difference(
            lambda v: loss(fis.with_consequents(v.reshape(shape)), ds), fis.consequents.ravel(), 1e-6
        )
        np.testing.assert_allclose(consequent_gradient(fis, ds).ravel(), numeric, rtol=1e-6, atol=1e-8)


class TestTrainConfig:
    def test_defaults(self):
        cfg = TrainConfig()
        assert (cfg.error_goal, cfg.initial_step, cfg.step_decrease, cfg.step_increase) == (0, 0.01, 0.9, 1.1)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epochs": 0},
            {"epochs": -3},
            {"epochs": 2.5},
            {"method": "adam"},
            {"step_decrease": 1.0},
            {"step_increase": 0.95},
            {"initial_step": -0.1},
        ],
    )
    def test_rejected(self, kwargs):
        with pytest.raises(ConfigurationError):
            TrainConfig(**kwargs)


class TestStepSchedule:
    def test_two_runs_of_four_decreases(self):
        sched = StepSizeSchedule(0.01, 0.9, 1.1, baseline=10.0)
        for err in [9, 8, 7, 6, 5, 4, 3, 2]:
            sched.observe(err)
        assert sched.step == pytest.approx(0.01 * 1.1**2)

    def test_oscillation_shrinks(self):
        sched = StepSizeSchedule(0.01, 0.9, 1.1, baseline=1.0)
        steps = [sched.observe(e) for e in [2.0, 1.0, 2.0, 1.0]]
        assert steps[:3] == [0.01] * 3
        assert steps[3] == pytest.approx(0.009)

    def test_flat_errors_leave_step(self):
        sched = StepSizeSchedule(0.01, 0.9, 1.1, baseline=1.0)
        for _ in range(10):
            sched.observe(1.0)
        assert sched.step == 0.01


class TestTrain:
    def test_one_hybrid_epoch_fits_exact_data(self):
        generator, ds = generated_dataset(2)
        start = generator.with_consequents(np.zeros_like(generator.consequents))
        _, hist = train(start, ds, TrainConfig(epochs=1))
        assert hist.epochs_run == 1 and hist.final_rmse < 1e-8
        assert hist.stop_reason == "epochs-exhausted"

    def test_error_goal_stops_early(self):
        generator, ds = generated_dataset(3)
        _, hist = train(generator, ds, TrainConfig(epochs=20, error_goal=1e300))
        assert hist.epochs_run == 1 and hist.stop_reason == "error-goal-met"

    @pytest.mark.parametrize("method", ["hybrid", "backprop"])
    def test_zero_step_keeps_premises(self, method):
        rng = np.random.default_rng(4)
        fis, x = random_model(rng, 2, (2, 3))
        ds = Dataset(x, np.cos(x[:, 0]) * x[:, 1])
        trained, _ = train(fis, ds, TrainConfig(epochs=5, initial_step=0.0, method=method))
        assert trained.premise_vector().tobytes() == fis.premise_vector().tobytes()

    def test_hybrid_history_consistent(self):
        rng = np.random.default_rng(6)
        fis, x = random_model(rng, 2, (3, 3), n=80)
        ds = Dataset(x, np.sin(x[:, 0]) * np.cos(x[:, 1]))
        trained, hist = train(fis, ds, TrainConfig(epochs=40, initial_step=0.05))
        assert len(hist.rmse) == len(hist.pre_lse_rmse) == len(hist.step_sizes) == 40
        assert all(r >= 0 for r in hist.rmse)
        assert all(post <= pre + 1e-12 for pre, post in zip(hist.pre_lse_rmse, hist.rmse))
        assert training_rmse(trained, ds) == pytest.approx(hist.final_rmse, rel=1e-9)
        assert hist.rmse[-1] < hist.rmse[0]

    def test_backprop_reduces_error(self):
        rng = np.random.default_rng(8)
        fis, x = random_model(rng, 2, (2, 2), n=40)
        fis = fis.with_consequents(np.zeros_like(fis.consequents))
        ds = Dataset(x, 0.5 * x[:, 0] - x[:, 1] + 1.0)
        trained, hist = train(fis, ds, TrainConfig(epochs=200, method="backprop", initial_step=0.1))
        assert hist.pre_lse_rmse == []
        assert hist.final_rmse < 0.5 * training_rmse(fis, ds)
        assert training_rmse(trained, ds) == pytest.approx(hist.final_rmse, rel=1e-12)

    def test_warns_when_underdetermined(self):
        rng = np.random.default_rng(10)
        fis, x = random_model(rng, 2, (3, 3), n=12)
        with pytest.warns(RuntimeWarning, match="ridge"):
            _, hist = train(fis, Dataset(x, rng.normal(size=12)), TrainConfig(epochs=2))
        assert hist.rank_deficient

    def test_rejects_plain_dict_config(self):
        fis, x = random_model(np.random.default_rng(0), 2)
        with pytest.raises(ConfigurationError):
            train(fis, Dataset(x, x[:, 0]), {"epochs": 3})

    def test_deterministic(self):
        rng = np.random.default_rng(14)
        fis, x = random_model(rng, 2, (2, 3), n=40)
        ds = Dataset(x, np.tanh(x[:, 0] - x[:, 1]))
        a, ha = train(fis, ds, TrainConfig(epochs=15))
        b, hb = train(fis, ds, TrainConfig(epochs=15))
        assert ha.rmse == hb.rmse
        assert a.premise_vector().tobytes() == b.premise_vector().tobytes()


def test_firing_floor_constant():
    assert FIRING_FLOOR == 1e-12
