"""Scikit-learn estimator wrappers."""

import numpy as np
import pytest
from sklearn.base import clone

from specpredict import data
from specpredict.estimator import OccupancyBinarizer, SpectrumMlpPredictor


def windows_from_bits(bits, order=3):
    dataset = data.window(np.asarray(bits), order)
    X = dataset.inputs
    y = (dataset.targets[:, 0] > 0).astype(int)
    return X, y


class TestSpectrumMlpPredictor:
    def test_get_params_set_params_clone(self):
        est = SpectrumMlpPredictor(hidden_sizes=(4,), trainer="lm", random_state=3)
        params = est.get_params()
        assert params["hidden_sizes"] == (4,)
        assert params["trainer"] == "lm"
        est.set_params(mu0=0.5)
        assert est.mu0 == 0.5
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_learns_an_alternating_series(self):
        X, y = windows_from_bits([0, 1] * 20)
        est = SpectrumMlpPredictor(
            hidden_sizes=(4,), trainer="lm", theta=1e-4, max_iterations=200, random_state=0
        )
        est.fit(X, y)
        assert np.array_equal(est.predict(X), y)
        assert est.final_error_ < 1e-4 * len(y)
        assert est.termination_reason_ == "goal"

    def test_decision_function_sign_matches_predict(self):
        X, y = windows_from_bits([0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 0, 0, 1, 0])
        est = SpectrumMlpPredictor(
            hidden_sizes=(3,), trainer="lm", max_iterations=20, random_state=1
        ).fit(X, y)
        scores = est.decision_function(X)
        labels = est.predict(X)
        np.testing.assert_array_equal(labels, np.where(scores >= 0.0, 1, 0))

    def test_class_labels_are_preserved(self):
        X, _ = windows_from_bits([0, 1] * 12)
        for labels in ((0, 1), (-1, 1), (5, 9)):
            y = np.where(windows_from_bits([0, 1] * 12)[1] == 1, labels[1], labels[0])
            est = SpectrumMlpPredictor(
                hidden_sizes=(4,), trainer="lm", theta=1e-4, max_iterations=200, random_state=0
            ).fit(X, y)
            np.testing.assert_array_equal(est.classes_, sorted(labels))
            assert set(est.predict(X).tolist()) <= set(labels)
            np.testing.assert_array_equal(est.predict(X), y)

    def test_single_class_rejected(self):
        X, _ = windows_from_bits([0, 1] * 5)
        with pytest.raises(ValueError):
            SpectrumMlpPredictor(trainer="lm").fit(X, np.ones(len(X)))

    def test_unknown_trainer_rejected(self):
        X, y = windows_from_bits([0, 1] * 5)
        with pytest.raises(ValueError):
            SpectrumMlpPredictor(trainer="sgd").fit(X, y)

    def test_feature_count_checked_at_predict(self):
        X, y = windows_from_bits([0, 1] * 8)
        est = SpectrumMlpPredictor(trainer="lm", hidden_sizes=(2,),
                                   max_iterations=5, random_state=0).fit(X, y)
        with pytest.raises(ValueError):
            est.predict(np.zeros((2, X.shape[1] + 1)))

    def test_random_state_makes_fits_identical(self):
        X, y = windows_from_bits([0, 1, 1, 0] * 8)
        fits = [
            SpectrumMlpPredictor(
                hidden_sizes=(3,), trainer="lm", max_iterations=30, random_state=42
            ).fit(X, y)
            for _ in range(2)
        ]
        np.testing.assert_array_equal(fits[0].weights_.to_flat(), fits[1].weights_.to_flat())
        np.testing.assert_array_equal(fits[0].predict(X), fits[1].predict(X))

    def test_ga_seeded_trainer_populates_ga_log(self):
        X, y = windows_from_bits([0, 1] * 10)
        est = SpectrumMlpPredictor(
            hidden_sizes=(3,), trainer="ga+lm", population_size=8, generations=3,
            max_iterations=10, random_state=0,
        ).fit(X, y)
        assert est.ga_log_ is not None and len(est.ga_log_.rows) >= 1
        assert est.weights_.topology.order == X.shape[1]

    def test_gradient_descent_trainer(self):
        X, y = windows_from_bits([0, 1] * 10)
        est = SpectrumMlpPredictor(
            hidden_sizes=(3,), trainer="gd", eta=0.3, max_epochs=150, random_state=0
        ).fit(X, y)
        assert est.ga_log_ is None
        assert est.train_log_.rows[-1][1] <= est.train_log_.rows[0][1]

    def test_fit_exposes_sklearn_attributes(self):
        X, y = windows_from_bits([0, 1] * 8)
        est = SpectrumMlpPredictor(trainer="lm", hidden_sizes=(2,),
                                   max_iterations=5, random_state=0).fit(X, y)
        assert est.n_features_in_ == 3
        assert est.classes_.tolist() == [0, 1]


class TestOccupancyBinarizer:
    def test_threshold_boundary_is_busy(self):
        X = np.array([[-75.0, -75.1], [-60.0, -90.0]])
        out = OccupancyBinarizer(threshold_dbm=-75.0).fit(X).transform(X)
        np.testing.assert_array_equal(out, [[1, 0], [1, 0]])
        assert out.dtype == np.uint8

    def test_matches_direct_comparison(self):
        rng = np.random.default_rng(12)
        X = rng.uniform(-100.0, -50.0, size=(30, 4))
        out = OccupancyBinarizer(threshold_dbm=-70.0).fit_transform(X)
        np.testing.assert_array_equal(out, (X >= -70.0).astype(np.uint8))

    def test_channel_count_checked(self):
        binarizer = OccupancyBinarizer().fit(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            binarizer.transform(np.zeros((2, 4)))

    def test_clone_keeps_threshold(self):
        assert clone(OccupancyBinarizer(threshold_dbm=-80.0)).threshold_dbm == -80.0
