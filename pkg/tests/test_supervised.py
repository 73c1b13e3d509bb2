"""Tests for scalers, k-best selection, the four classifiers, and CV."""

import json

import numpy as np
import pytest

from specdetect import Pipeline, ValidationError, cross_validate, fit, predict
from specdetect.supervised import (
    _apply_scaler,
    _fit_scaler,
    anova_f,
    expand_grid,
    load_pipeline,
    save_pipeline,
    select_k_best,
    stratified_folds,
)
from specdetect.synthetic import shuffled_labels, synthetic_feature_set

ALL_CLASSIFIER_CONFIGS = [
    ("logreg", {"penalty": "l2", "C": 1.0}),
    ("logreg", {"penalty": "l1", "C": 1.0}),
    ("linear_svm", {"C": 1.0}),
    ("knn", {"n_neighbors": 3}),
    ("naive_bayes", {"alpha": 1.0}),
]

SMALL_TEST_GRID = {
    "scalers": ["minmax", "zscore", "robust"],
    "k_best": [10],
    "classifiers": {
        "logreg": {"penalty": ["l2"], "C": [1]},
        "linear_svm": {"C": [1]},
        "knn": {"n_neighbors": [5]},
        "naive_bayes": {"alpha": [1]},
    },
}


def two_clusters(n_per_class=20, gap=2.0, seed=0, n_features=1):
    rng = np.random.default_rng(seed)
    X0 = rng.normal(loc=-gap / 2, scale=0.2, size=(n_per_class, n_features))
    X1 = rng.normal(loc=+gap / 2, scale=0.2, size=(n_per_class, n_features))
    X = np.vstack([X0, X1])
    y = np.array([0] * n_per_class + [1] * n_per_class)
    return X, y


class TestScalers:
    def test_minmax_unit_interval_on_train(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(30, 5)) * 7 + 3
        params = _fit_scaler("minmax", X)
        out = _apply_scaler("minmax", params, X)
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_zscore_centers(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(40, 3)) * 4 - 2
        out = _apply_scaler("zscore", _fit_scaler("zscore", X), X)
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(out.std(axis=0), 1.0, atol=1e-12)

    def test_constant_feature_maps_to_zero(self):
        X = np.ones((10, 2))
        X[:, 1] = np.arange(10)
        for name in ("minmax", "zscore", "robust"):
            out = _apply_scaler(name, _fit_scaler(name, X), X)
            np.testing.assert_array_equal(out[:, 0], 0.0)

    def test_robust_ignores_extreme_corruption(self):
        # corrupting the maximum (a non-quartile order statistic) must not
        # move the median/IQR statistics
        rng = np.random.default_rng(2)
        X = rng.normal(size=(21, 3))
        corrupted = X.copy()
        top = np.argmax(corrupted[:, 0])
        corrupted[top, 0] *= 1000.0
        p_clean = _fit_scaler("robust", X)
        p_corrupt = _fit_scaler("robust", corrupted)
        np.testing.assert_allclose(p_clean["median"], p_corrupt["median"])
        np.testing.assert_allclose(p_clean["iqr"], p_corrupt["iqr"])


class TestKBest:
    @staticmethod
    def pooled_t_squared(a, b):
        """Independent oracle: for two groups, one-way ANOVA F equals t^2."""
        na, nb = len(a), len(b)
        sp2 = (((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()) / (na + nb - 2)
        t = (a.mean() - b.mean()) / np.sqrt(sp2 * (1 / na + 1 / nb))
        return t * t

    def test_f_matches_t_squared(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(24, 6))
        y = np.array([0] * 12 + [1] * 12)
        X[y == 1, :3] += rng.uniform(0.5, 2.0, size=3)
        f = anova_f(X, y)
        for j in range(6):
            expected = self.pooled_t_squared(X[y == 0, j], X[y == 1, j])
            assert f[j] == pytest.approx(expected, rel=1e-10)

    def test_selects_separated_features(self):
        # fixed 12-point set: features 0 and 1 carry a gap of >= 5 within-std,
        # feature 2 has identical class means
        X = np.array([
            # f0     f1    f2
            [0.00, 1.00, 0.3],
            [0.10, 1.20, -0.3],
            [-0.10, 0.80, 0.1],
            [0.05, 1.10, -0.1],
            [-0.05, 0.90, 0.2],
            [0.00, 1.00, -0.2],
            [5.00, 7.00, -0.3],
            [5.10, 7.20, 0.3],
            [4.90, 6.80, -0.1],
            [5.05, 7.10, 0.1],
            [4.95, 6.90, -0.2],
            [5.00, 7.00, 0.2],
        ])
        y = np.array([0] * 6 + [1] * 6)
        f = anova_f(X, y)
        for j in (0, 1):
            expected = self.pooled_t_squared(X[y == 0, j], X[y == 1, j])
            assert f[j] == pytest.approx(expected, rel=1e-10)
        assert f[2] == pytest.approx(0.0, abs=1e-12)
        assert set(select_k_best(X, y, 2)) == {0, 1}

    def test_tie_break_by_index(self):
        X = np.zeros((8, 3))
        y = np.array([0] * 4 + [1] * 4)
        np.testing.assert_array_equal(select_k_best(X, y, 2), [0, 1])


class TestFitPredict:
    @pytest.mark.parametrize("classifier,hyper", ALL_CLASSIFIER_CONFIGS)
    def test_separable_clusters_train_accuracy_one(self, classifier, hyper):
        X, y = two_clusters()
        pipeline = Pipeline(scaler="minmax", k_best=1, classifier=classifier,
                            hyperparams=hyper)
        fitted = fit(pipeline, X, y)
        assert (predict(fitted, X) == y).mean() == 1.0

    def test_single_class_rejected(self):
        X = np.random.default_rng(4).normal(size=(10, 3))
        with pytest.raises(ValidationError):
            fit(Pipeline("minmax", 1, "logreg"), X, np.zeros(10, dtype=int))

    def test_nan_features_rejected(self):
        X, y = two_clusters()
        X[0, 0] = np.nan
        with pytest.raises(ValidationError):
            fit(Pipeline("minmax", 1, "logreg"), X, y)

    def test_k_best_exceeding_dim_rejected(self):
        X, y = two_clusters(n_features=3)
        with pytest.raises(ValidationError):
            fit(Pipeline("minmax", 4, "logreg"), X, y)

    def test_unfitted_predict_rejected(self):
        with pytest.raises(ValidationError):
            predict(Pipeline("minmax", 1, "knn"), np.zeros((2, 1)))

    def test_nonpositive_nb_alpha_rejected(self):
        X, y = two_clusters()
        with pytest.raises(ValidationError):
            fit(Pipeline("minmax", 1, "naive_bayes", {"alpha": 0.0}), X, y)

    def test_knn_recovers_own_label(self):
        X, y = two_clusters(n_per_class=10, gap=1.0, seed=5)
        fitted = fit(Pipeline("zscore", 1, "knn", {"n_neighbors": 1}), X, y)
        np.testing.assert_array_equal(predict(fitted, X), y)

    def test_logreg_invariant_to_duplicated_batch(self):
        X, y = two_clusters(seed=6)
        fitted = fit(Pipeline("zscore", 1, "logreg", {"penalty": "l2", "C": 1.0}),
                     X, y)
        single = predict(fitted, X)
        doubled = predict(fitted, np.vstack([X, X]))
        np.testing.assert_array_equal(doubled[: len(X)], single)
        np.testing.assert_array_equal(doubled[len(X):], single)

    def test_svm_boundary_tie_goes_to_label_zero(self):
        state = {
            "n_features_in": 1,
            "scaler_params": {"mean": np.zeros(1), "std": np.ones(1)},
            "selected": np.array([0]),
            "classifier_state": {"w": np.array([2.0]), "b": 0.0, "n_iter": 1},
        }
        pipeline = Pipeline("zscore", 1, "linear_svm", {"C": 1.0},
                            fitted_state=state)
        np.testing.assert_array_equal(
            predict(pipeline, np.array([[0.0], [1.0], [-1.0]])), [0, 1, 0])

    def test_scaler_sees_training_data_only(self):
        X, y = two_clusters(seed=7, n_features=4)
        fitted = fit(Pipeline("minmax", 2, "knn", {"n_neighbors": 3}), X, y)
        params_before = {k: v.copy() for k, v in
                         fitted.fitted_state["scaler_params"].items()}
        outlier = np.full((1, 4), 1e9)
        predict(fitted, outlier)
        refitted = fit(Pipeline("minmax", 2, "knn", {"n_neighbors": 3}), X, y)
        for key in params_before:
            np.testing.assert_array_equal(
                refitted.fitted_state["scaler_params"][key], params_before[key])


class TestStratifiedFolds:
    def test_class_ratio_within_one_sample(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n0 = int(rng.integers(10, 60))
            n1 = int(rng.integers(10, 60))
            y = np.array([0] * n0 + [1] * n1)
            folds = stratified_folds(y, 5, seed=int(rng.integers(1000)))
            assert sorted(np.concatenate(folds)) == list(range(n0 + n1))
            for fold in folds:
                ones = int(y[fold].sum())
                assert abs(ones - n1 / 5) <= 1
                assert abs((len(fold) - ones) - n0 / 5) <= 1

    def test_too_few_per_class_rejected(self):
        y = np.array([0] * 3 + [1] * 10)
        with pytest.raises(ValidationError):
            stratified_folds(y, 5, seed=0)


class TestCrossValidate:
    def test_separable_synthetic_reaches_095(self):
        X, y = synthetic_feature_set(120, n_features=40, shift=3.0,
                                     n_shifted=8, seed=9)
        report = cross_validate(X, y, SMALL_TEST_GRID, folds=5, seed=1)
        assert report.mean_accuracy >= 0.95

    def test_no_signal_band(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(200, 30))
        y = np.array([0, 1] * 100)
        report = cross_validate(X, y, SMALL_TEST_GRID, folds=5, seed=2)
        for row in report.grid_results:
            assert 0.35 <= row["mean_accuracy"] <= 0.65

    def test_deterministic_given_seed(self):
        X, y = synthetic_feature_set(60, n_features=20, n_shifted=4, seed=11)
        a = cross_validate(X, y, SMALL_TEST_GRID, folds=5, seed=3)
        b = cross_validate(X, y, SMALL_TEST_GRID, folds=5, seed=3)
        assert json.dumps(a.to_dict(), sort_keys=True) == \
            json.dumps(b.to_dict(), sort_keys=True)

    def test_mean_matches_folds(self):
        X, y = synthetic_feature_set(60, n_features=20, n_shifted=4, seed=12)
        report = cross_validate(X, y, SMALL_TEST_GRID, folds=5, seed=4)
        assert report.mean_accuracy == pytest.approx(
            np.mean(report.per_fold_accuracy), abs=1e-12)
        for row in report.grid_results:
            assert 0.0 <= row["mean_accuracy"] <= 1.0

    def test_shuffled_labels_destroy_signal(self):
        X, y = synthetic_feature_set(200, n_features=30, n_shifted=6, seed=13)
        y_shuffled = shuffled_labels(y, seed=14)
        report = cross_validate(X, y_shuffled, SMALL_TEST_GRID, folds=5, seed=5)
        for row in report.grid_results:
            assert 0.35 <= row["mean_accuracy"] <= 0.65


class TestGridExpansion:
    def test_appendix_grid_size(self):
        configs = expand_grid({}, n_features=500)
        # 3 scalers x 10 k values x (6 logreg + 3 svm + 4 knn + 3 nb)
        assert len(configs) == 3 * 10 * 16

    def test_k_filtered_by_dimension(self):
        configs = expand_grid({}, n_features=100)
        assert all(c.k_best <= 100 for c in configs)
        assert {c.k_best for c in configs} == {50, 80, 100}

    def test_k_fallback_when_all_exceed(self):
        configs = expand_grid({"k_best": [50]}, n_features=10)
        assert {c.k_best for c in configs} == {10}


class TestPersistence:
    def test_round_trip_preserves_predictions(self, tmp_path):
        X, y = two_clusters(seed=15, n_features=3)
        fitted = fit(Pipeline("robust", 2, "naive_bayes", {"alpha": 0.5}), X, y)
        path = tmp_path / "pipeline.json"
        save_pipeline(fitted, path)
        loaded = load_pipeline(path)
        np.testing.assert_array_equal(predict(loaded, X), predict(fitted, X))

    def test_unfitted_save_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            save_pipeline(Pipeline("minmax", 1, "knn"), tmp_path / "x.json")
