import numpy as np
import pytest

from epispread import (
    CooperativeModel,
    IntegrationConfig,
    MlpConfig,
    MlpModel,
    StandardizationParams,
    TooFewSamples,
    TrainConfig,
    estimate_rate_series,
    evaluate,
    fit_poly_baseline,
    generate_dataset,
    init_model,
    predict_cooperative,
    split,
    train,
    train_cooperative,
)
from epispread.clustering import ClusterModel
from epispread.pipeline import (
    dataset_from_trajectory,
    read_dataset_csv,
    write_dataset_csv,
    write_eval_csv,
    write_rate_csv,
)


def identity_scaler():
    return StandardizationParams(mean=np.array([0.0]), std=np.array([1.0]))


def constant_network(value):
    return MlpModel(
        hidden_weights=np.zeros(5),
        hidden_biases=np.zeros(5),
        output_weights=np.zeros(5),
        output_bias=value,
    )


def manual_cooperative(centroid_inputs, networks,
                       x2_scaler=None, x1_scaler=None):
    centroids = np.column_stack([centroid_inputs,
                                 np.zeros(len(centroid_inputs))])
    clusters = ClusterModel(
        k=len(networks),
        centroids=centroids,
        assignments=np.empty(0, dtype=np.intp),
        objective=0.0,
    )
    return CooperativeModel(
        clusters=clusters,
        networks=networks,
        x2_scaler=x2_scaler or identity_scaler(),
        x1_scaler=x1_scaler or identity_scaler(),
    )


class TestGenerateDataset:
    def test_model1_first_pair(self, model1_cfg):
        ds = generate_dataset(model1_cfg.params, model1_cfg.init,
                              model1_cfg.integration)
        assert (ds.x2_raw[0], ds.x1_raw[0]) == (10.0, 10000.0)

    def test_model2_first_pair(self, model2_cfg):
        ds = generate_dataset(model2_cfg.params, model2_cfg.init,
                              model2_cfg.integration)
        assert (ds.x2_raw[0], ds.x1_raw[0]) == (10.0, 1000.0)

    def test_sample_count_matches_decimation(self, model1_cfg):
        config = IntegrationConfig(step=0.001, t_end=0.05, sample_every=7)
        ds = generate_dataset(model1_cfg.params, model1_cfg.init, config)
        assert len(ds) == 50 // 7 + 1

    def test_standardized_columns_have_unit_moments(self, model1_run):
        ds = model1_run.dataset
        assert abs(ds.x2_std.mean()) < 1e-12
        assert abs(ds.x2_std.std(ddof=1) - 1.0) < 1e-12
        assert abs(ds.x1_std.mean()) < 1e-12

    def test_integration_faults_propagate(self, model2_cfg):
        from epispread import IntegrationFault

        config = IntegrationConfig(step=0.01, t_end=35.0)
        with pytest.raises(IntegrationFault):
            generate_dataset(model2_cfg.params, model2_cfg.init, config)

    def test_constant_trajectory_is_degenerate(self, model2_cfg):
        # no infectives and no control: nothing moves, nothing to standardize
        from epispread import DegenerateFeature, ModelParams, State

        params = ModelParams(beta=model2_cfg.params.beta,
                             gamma=model2_cfg.params.gamma,
                             m1=model2_cfg.params.m1, m2=model2_cfg.params.m2)
        config = IntegrationConfig(step=0.001, t_end=0.1, sample_every=10)
        with pytest.raises(DegenerateFeature):
            generate_dataset(params, State(1000.0, 0.0), config)

    def test_csv_round_trip(self, model1_run, tmp_path):
        path = tmp_path / "data.csv"
        write_dataset_csv(model1_run.dataset, path)
        assert path.read_text().splitlines()[0] == "x2_raw,x1_raw,x2_std,x1_std"
        back = read_dataset_csv(path)
        assert np.array_equal(back.x2_raw, model1_run.dataset.x2_raw)
        assert np.array_equal(back.x1_raw, model1_run.dataset.x1_raw)
        assert np.array_equal(back.x2_std, model1_run.dataset.x2_std)
        assert back.x2_scaler.mean[0] == model1_run.dataset.x2_scaler.mean[0]


class TestSplit:
    def _toy(self, n=10):
        rng = np.random.default_rng(1)
        times = np.arange(n, dtype=np.float64)
        x2 = rng.uniform(1, 2, n)
        x1 = rng.uniform(10, 20, n)

        class Traj:
            pass

        traj = Traj()
        traj.x2 = x2
        traj.x1 = x1
        traj.times = times
        return dataset_from_trajectory(traj)

    def test_seven_three(self):
        train_set, test_set = split(self._toy(10), 0.7, seed=0)
        assert (len(train_set), len(test_set)) == (7, 3)

    def test_same_seed_same_split(self):
        ds = self._toy(20)
        a = split(ds, 0.7, seed=5)
        b = split(ds, 0.7, seed=5)
        assert np.array_equal(a[0].x2_raw, b[0].x2_raw)
        assert np.array_equal(a[1].x2_raw, b[1].x2_raw)

    def test_partition_property(self):
        ds = self._toy(15)
        train_set, test_set = split(ds, 0.6, seed=3)
        merged = np.sort(np.concatenate([train_set.x2_raw, test_set.x2_raw]))
        assert np.array_equal(merged, np.sort(ds.x2_raw))
        assert len(set(train_set.times) & set(test_set.times)) == 0

    def test_too_few_samples(self):
        ds = self._toy(3)
        with pytest.raises(TooFewSamples):
            split(ds, 0.1, seed=0)
        with pytest.raises(ValueError):
            split(ds, 1.2, seed=0)


class TestTrainCooperative:
    def test_model1_yields_three_networks(self, model1_run):
        assert model1_run.cooperative.k == 3
        assert len(model1_run.cooperative.networks) == 3

    def test_k_one_degenerates_to_single_network(self, model1_run):
        coop = train_cooperative(model1_run.train_set, 1, seed=1,
                                 tconfig=TrainConfig(max_epochs=100))
        assert coop.k == 1

    def test_auto_k_on_three_blobs(self):
        rng = np.random.default_rng(2)
        xs = np.concatenate([rng.normal(c, 0.05, 30) for c in (-3.0, 0.0, 3.0)])
        ys = np.concatenate([np.full(30, c) + rng.normal(0, 0.05, 30)
                             for c in (1.0, -1.0, 2.0)])

        class Traj:
            pass

        traj = Traj()
        traj.x2 = xs
        traj.x1 = ys
        traj.times = np.arange(90, dtype=np.float64)
        ds = dataset_from_trajectory(traj)
        coop = train_cooperative(ds, "auto", seed=4,
                                 tconfig=TrainConfig(max_epochs=200))
        assert coop.k == 3

    def test_small_clusters_are_merged(self):
        # one far outlier pair cannot sustain its own cluster
        rng = np.random.default_rng(3)
        xs = np.concatenate([rng.normal(0.0, 0.1, 30),
                             rng.normal(3.0, 0.1, 30), [50.0, 50.1]])
        ys = np.concatenate([rng.normal(0.0, 0.1, 30),
                             rng.normal(1.0, 0.1, 30), [5.0, 5.1]])

        class Traj:
            pass

        traj = Traj()
        traj.x2 = xs
        traj.x1 = ys
        traj.times = np.arange(62, dtype=np.float64)
        ds = dataset_from_trajectory(traj)
        coop = train_cooperative(ds, 3, seed=0,
                                 tconfig=TrainConfig(max_epochs=100))
        assert coop.k == 2

    def test_per_cluster_beats_single_global_network(self, model2_run):
        # comparative fixture on the Model 2 training split: same epoch
        # budget for both sides, no early stop, master seed
        train_set = model2_run.train_set
        config = TrainConfig(max_epochs=300, target_mse=0.0)
        coop = train_cooperative(train_set, 3, seed=1, tconfig=config)
        global_model = init_model(MlpConfig(seed=[1, 99, 0]))
        global_trained, _ = train(global_model, train_set.x2_std,
                                  train_set.x1_std, config)
        for net in coop.networks:
            assert net.final_mse < global_trained.final_mse


class TestRouting:
    def test_centroid_input_selects_its_cluster(self):
        coop = manual_cooperative([-1.0, 0.5, 2.0],
                                  [constant_network(v) for v in (10.0, 20.0, 30.0)])
        assert predict_cooperative(coop, -1.0) == 10.0
        assert predict_cooperative(coop, 0.5) == 20.0
        assert predict_cooperative(coop, 2.0) == 30.0

    def test_ties_go_to_lowest_index(self):
        coop = manual_cooperative([-1.0, 1.0],
                                  [constant_network(10.0), constant_network(20.0)])
        assert predict_cooperative(coop, 0.0) == 10.0

    def test_partition_of_inputs(self, model1_run):
        coop = model1_run.cooperative
        test_set = model1_run.test_set
        z = coop.x2_scaler.apply(test_set.x2_raw)
        routes = coop.route(z)
        counts = np.bincount(routes, minlength=coop.k)
        assert counts.sum() == len(test_set)

    def test_prediction_is_deterministic(self, model1_run):
        coop = model1_run.cooperative
        xs = model1_run.test_set.x2_raw
        assert np.array_equal(coop.predict_susceptible(xs),
                              coop.predict_susceptible(xs))

    def test_trained_single_point_interpolation(self):
        model = init_model(MlpConfig(seed=0))
        config = TrainConfig(max_epochs=3000, target_mse=1e-10)
        trained, _ = train(model, np.array([0.4]), np.array([-0.3]), config)
        coop = manual_cooperative([0.4], [trained])
        assert abs(predict_cooperative(coop, 0.4) - (-0.3)) < 1e-3

    def test_restandardized_predictions_match_network_outputs(self, model1_run):
        coop = model1_run.cooperative
        xs = model1_run.test_set.x2_raw
        raw = coop.predict_susceptible(xs)
        again = (raw - coop.x1_scaler.mean[0]) / coop.x1_scaler.std[0]
        direct = coop.predict_standardized(coop.x2_scaler.apply(xs))
        assert np.allclose(again, direct, rtol=1e-10, atol=1e-10)


class _OraclePredictor:
    """Returns the trajectory's true susceptibles for its own infectives."""

    method_label = "oracle"

    def __init__(self, traj):
        self._x1 = traj.x1

    def predict_susceptible(self, x2_values):
        return self._x1.copy()


class _ConstantPredictor:
    method_label = "constant"

    def __init__(self, value):
        self.value = value

    def predict_susceptible(self, x2_values):
        return np.full(np.atleast_1d(x2_values).shape, self.value)


class TestRateSeries:
    def test_truth_oracle_reproduces_actual(self, model2_run, model2_cfg):
        from epispread import State, rate_of_spread

        traj = model2_run.trajectory
        report = estimate_rate_series(model2_cfg.params, traj,
                                      _OraclePredictor(traj))
        assert np.array_equal(report.estimated["oracle"], report.actual)
        assert report.rmse["oracle"] == 0.0
        # the series must agree pointwise with the scalar rate operation
        pointwise = np.array([
            rate_of_spread(model2_cfg.params, State(a, b))
            for a, b in zip(traj.x1, traj.x2)
        ])
        assert np.allclose(report.actual, pointwise, rtol=1e-12, atol=0)

    def test_bilinear_rate_value(self, rate1_cfg):
        class Traj:
            times = np.array([0.0])
            x1 = np.array([1000.0])
            x2 = np.array([10.0])

        report = estimate_rate_series(rate1_cfg.params, Traj(),
                                      _ConstantPredictor(1000.0))
        assert report.actual[0] == pytest.approx(10.0, rel=1e-12)

    def test_negative_predictions_clamped(self, rate1_cfg):
        class Traj:
            times = np.array([0.0, 1.0])
            x1 = np.array([100.0, 100.0])
            x2 = np.array([10.0, 20.0])

        report = estimate_rate_series(rate1_cfg.params, Traj(),
                                      _ConstantPredictor(-5.0))
        assert np.array_equal(report.estimated["constant"], [0.0, 0.0])

    def test_rate_csv(self, model1_run, tmp_path):
        report = model1_run.rate
        path = tmp_path / "rate.csv"
        write_rate_csv(report, path, method="cooperative_nn")
        lines = path.read_text().splitlines()
        assert lines[0] == "t,actual,estimated"
        assert len(lines) == len(report.times) + 1


class TestEvaluate:
    def test_constant_predictor_gives_population_variance(self, model1_run):
        test_set = model1_run.test_set
        mean = float(np.mean(test_set.x1_raw))
        scores = evaluate({"const": _ConstantPredictor(mean)}, test_set)
        direct = sum((v - mean) ** 2 for v in test_set.x1_raw) / len(test_set)
        assert scores["const"].mse_raw == pytest.approx(direct, rel=1e-12)

    def test_identical_predictors_identical_scores(self, model1_run):
        train_set, test_set = model1_run.train_set, model1_run.test_set
        a = fit_poly_baseline(train_set, 2)
        b = fit_poly_baseline(train_set, 2)
        scores = evaluate({"a": a, "b": b}, test_set)
        assert scores["a"].mse_raw == scores["b"].mse_raw
        assert scores["a"].mse_std == scores["b"].mse_std

    def test_report_shape_and_csv(self, model1_run, tmp_path):
        report = model1_run.report
        assert report.n_train == 700 and report.n_test == 301
        assert set(report.train) == {"cooperative_nn", "poly_degree_1",
                                     "poly_degree_2"}
        path = tmp_path / "report.csv"
        write_eval_csv(report, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "method,train_mse,test_mse"
        assert len(lines) == 4

    def test_std_and_raw_units_are_consistent(self, model1_run):
        scale = float(model1_run.dataset.x1_scaler.std[0]) ** 2
        for score in model1_run.report.test.values():
            assert score.mse_std == pytest.approx(score.mse_raw / scale, rel=1e-12)


class TestModelDirectory:
    def test_save_load_round_trip(self, model1_run, tmp_path):
        coop = model1_run.cooperative
        path = tmp_path / "model_dir"
        coop.save(path, meta={"seed": 1, "train_fraction": 0.7})
        loaded, meta = CooperativeModel.load(path)
        assert meta["seed"] == "1"
        assert loaded.k == coop.k
        xs = model1_run.test_set.x2_raw
        assert np.array_equal(loaded.predict_susceptible(xs),
                              coop.predict_susceptible(xs))


class TestEndToEndDeterminism:
    def test_repeat_runs_are_byte_identical(self, model1_cfg, tmp_path):
        from epispread import run_experiment

        outputs = []
        for tag in ("a", "b"):
            res = run_experiment(model1_cfg.params, model1_cfg.init,
                                 model1_cfg.integration, seed=model1_cfg.seed)
            base = tmp_path / tag
            base.mkdir()
            res.trajectory.to_csv(base / "traj.csv")
            write_dataset_csv(res.dataset, base / "data.csv")
            write_eval_csv(res.report, base / "report.csv")
            write_rate_csv(res.rate, base / "rate.csv", method="cooperative_nn")
            outputs.append(base)
        for name in ("traj.csv", "data.csv", "report.csv", "rate.csv"):
            assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()
