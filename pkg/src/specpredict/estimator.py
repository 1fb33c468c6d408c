"""Scikit-learn style wrappers around the network and trainers.

``SpectrumMlpPredictor`` is a binary classifier over fixed-length history
windows; ``OccupancyBinarizer`` is the matching transformer that turns a
power matrix into busy/idle bits.  Both keep constructor arguments
verbatim so ``get_params``/``set_params`` and cloning behave as sklearn
expects.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._validation import as_rng
from .errors import StructuralError
from .genetic import GaConfig, ga_lm_train
from .network import NetworkTopology, init_random, network_outputs
from .training import GdConfig, LmConfig, train_gd, train_lm

TRAINERS = ("gd", "lm", "ga+lm")


class SpectrumMlpPredictor(BaseEstimator, ClassifierMixin):
    """Next-slot occupancy classifier backed by a small feedforward network.

    Each sample is one history window; the label is the slot that follows
    it.  Training runs plain gradient descent, damped least squares, or a
    genetic search whose best individual seeds the damped solver.

    Parameters mirror the underlying trainer configs; see ``GdConfig``,
    ``LmConfig`` and ``GaConfig`` for semantics.  ``theta`` is the target
    error per pattern per output.
    """

    def __init__(
        self,
        hidden_sizes=(10,),
        trainer="ga+lm",
        eta=0.1,
        theta=0.01,
        max_epochs=1000,
        mu0=1e-3,
        beta=10.0,
        mu_max=1e10,
        max_iterations=1000,
        population_size=50,
        generations=100,
        crossover_prob=0.8,
        mutation_prob=0.05,
        crossover_kind="one-point",
        mutation_kind="gaussian",
        gaussian_sigma=0.1,
        elitism=1,
        gene_range=(-1.0, 1.0),
        fitness_patterns=None,
        weight_range=(-1.0, 1.0),
        random_state=None,
    ):
        self.hidden_sizes = hidden_sizes
        self.trainer = trainer
        self.eta = eta
        self.theta = theta
        self.max_epochs = max_epochs
        self.mu0 = mu0
        self.beta = beta
        self.mu_max = mu_max
        self.max_iterations = max_iterations
        self.population_size = population_size
        self.generations = generations
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.crossover_kind = crossover_kind
        self.mutation_kind = mutation_kind
        self.gaussian_sigma = gaussian_sigma
        self.elitism = elitism
        self.gene_range = gene_range
        self.fitness_patterns = fitness_patterns
        self.weight_range = weight_range
        self.random_state = random_state

    def _lm_config(self) -> LmConfig:
        return LmConfig(
            mu0=self.mu0,
            beta=self.beta,
            mu_max=self.mu_max,
            theta=self.theta,
            max_iterations=self.max_iterations,
        )

    def _ga_config(self) -> GaConfig:
        return GaConfig(
            population_size=self.population_size,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            gene_range=tuple(self.gene_range),
            crossover_kind=self.crossover_kind,
            mutation_kind=self.mutation_kind,
            gaussian_sigma=self.gaussian_sigma,
            elitism=self.elitism,
            fitness_patterns=self.fitness_patterns,
        )

    def fit(self, X, y):
        """Train on windows ``X`` and next-slot labels ``y``.

        ``y`` may use any two label values; the larger one is treated as
        busy.  Returns self.
        """
        X, y = check_X_y(X, y, dtype=np.float64)
        if self.trainer not in TRAINERS:
            raise ValueError(f"trainer must be one of {TRAINERS}, got {self.trainer!r}")
        self.classes_ = np.unique(y)
        if self.classes_.shape[0] != 2:
            raise ValueError(
                f"needs exactly 2 classes, got {self.classes_.shape[0]}: {self.classes_}"
            )
        targets = np.where(y == self.classes_[1], 1.0, -1.0).reshape(-1, 1)
        topology = NetworkTopology(
            order=X.shape[1],
            hidden_sizes=tuple(int(h) for h in self.hidden_sizes),
            output_size=1,
        )
        root = as_rng(self.random_state)
        ga_rng, init_rng, gd_rng = root.spawn(3)
        patterns = (X, targets)

        self.ga_log_ = None
        if self.trainer == "ga+lm":
            result = ga_lm_train(topology, patterns, self._ga_config(), self._lm_config(), ga_rng)
            weights, log = result.weights, result.train_log
            self.ga_log_ = result.ga_log
        elif self.trainer == "lm":
            weights = init_random(topology, tuple(self.weight_range), init_rng)
            weights, log = train_lm(weights, patterns, self._lm_config())
        else:
            weights = init_random(topology, tuple(self.weight_range), init_rng)
            config = GdConfig(eta=self.eta, theta=self.theta, max_epochs=self.max_epochs)
            weights, log = train_gd(weights, patterns, config, gd_rng)

        self.topology_ = topology
        self.weights_ = weights
        self.train_log_ = log
        self.final_error_ = log.final_error
        self.termination_reason_ = log.reason
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X) -> np.ndarray:
        """Raw network outputs in (-1, 1); at or above zero means busy."""
        check_is_fitted(self, "weights_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return network_outputs(self.weights_, X)[:, 0]

    def predict(self, X) -> np.ndarray:
        scores = self.decision_function(X)
        return np.where(scores >= 0.0, self.classes_[1], self.classes_[0])


class OccupancyBinarizer(BaseEstimator, TransformerMixin):
    """Threshold a (sweeps, channels) power matrix into busy/idle bits.

    A reading at or above ``threshold_dbm`` maps to 1.
    """

    def __init__(self, threshold_dbm=-75.0):
        self.threshold_dbm = threshold_dbm

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if not np.isfinite(self.threshold_dbm):
            raise StructuralError("threshold_dbm must be finite")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} channels, expected {self.n_features_in_}"
            )
        return (X >= float(self.threshold_dbm)).astype(np.uint8)
