"""Error function, backpropagation, and the two trainers.

Gradient descent applies the per-pattern delta rule; the damped
Gauss-Newton (Levenberg-Marquardt) trainer solves the regularized normal
equations over the full pattern set each iteration.  Both stop once the
summed squared error drops below the configured goal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from ._validation import as_rng
from .errors import NumericalError, StructuralError
from .network import (
    NetworkWeights,
    _flatten_layers,
    activation_derivative,
    forward,
    forward_batch,
    network_outputs,
)

# An epoch error beyond this (or any non-finite value) counts as divergence.
DIVERGENCE_LIMIT = 1e12

REASON_GOAL = "goal"
REASON_MAX_ITER = "max_iter"
REASON_STALLED = "stalled"
REASON_DIVERGED = "diverged"


class TrainingPattern(NamedTuple):
    """One supervised example: an input window and its next-slot target."""

    input: np.ndarray
    target: np.ndarray


def as_pattern_arrays(patterns):
    """Normalize patterns into a (inputs, targets) pair of 2-D arrays.

    Accepts a WindowedDataset-like object (``inputs``/``targets``
    attributes), a ``(X, T)`` array pair, or a sequence of
    (input, target) pairs.  Targets must be finite and lie in [-1, 1] so
    the activation can reach them; 1-D targets are reshaped to one output.
    """
    if hasattr(patterns, "inputs") and hasattr(patterns, "targets"):
        x, t = patterns.inputs, patterns.targets
    elif isinstance(patterns, tuple) and len(patterns) == 2:
        x, t = patterns
    else:
        pairs = list(patterns)
        if not pairs:
            raise StructuralError("pattern set is empty")
        x = np.stack([np.asarray(p[0], dtype=np.float64) for p in pairs])
        t = np.stack([np.asarray(p[1], dtype=np.float64) for p in pairs])
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if t.ndim == 1:
        t = t[:, None]
    if x.ndim != 2 or t.ndim != 2 or x.shape[0] != t.shape[0]:
        raise StructuralError(f"incompatible pattern shapes {x.shape} / {t.shape}")
    if x.shape[0] == 0:
        raise StructuralError("pattern set is empty")
    if not np.all(np.isfinite(x)):
        raise StructuralError("pattern inputs contain non-finite entries")
    if not np.all(np.isfinite(t)) or np.any(np.abs(t) > 1.0):
        raise StructuralError("pattern targets must be finite and lie in [-1, 1]")
    return x, t


@dataclass(frozen=True)
class GdConfig:
    """Per-pattern gradient-descent settings.

    ``theta`` is the error goal per pattern and output; the trainer stops
    once the summed error falls below theta * n_patterns * n_outputs.
    """

    eta: float = 0.1
    theta: float = 0.01
    max_epochs: int = 1000
    mode: str = "per-pattern"

    def __post_init__(self):
        if not self.eta >= 0.0:
            raise StructuralError(f"eta must be >= 0, got {self.eta}")
        if not self.theta > 0.0:
            raise StructuralError(f"theta must be > 0, got {self.theta}")
        if self.max_epochs < 0:
            raise StructuralError(f"max_epochs must be >= 0, got {self.max_epochs}")
        if self.mode != "per-pattern":
            raise StructuralError(f"unsupported update mode {self.mode!r}")


@dataclass(frozen=True)
class LmConfig:
    """Damped Gauss-Newton settings.

    The damping factor starts at ``mu0``, is divided by ``beta`` after an
    accepted step and multiplied by ``beta`` after a rejected one; the run
    stalls once it exceeds ``mu_max``.  ``theta`` scales like GdConfig's.
    """

    mu0: float = 1e-3
    beta: float = 10.0
    mu_max: float = 1e10
    theta: float = 0.01
    max_iterations: int = 1000

    def __post_init__(self):
        if not self.mu0 > 0.0:
            raise StructuralError(f"mu0 must be > 0, got {self.mu0}")
        if not self.beta > 1.0:
            raise StructuralError(f"beta must be > 1, got {self.beta}")
        if not self.mu_max > self.mu0:
            raise StructuralError(f"mu_max must exceed mu0, got {self.mu_max}")
        if not self.theta > 0.0:
            raise StructuralError(f"theta must be > 0, got {self.theta}")
        if self.max_iterations < 0:
            raise StructuralError(f"max_iterations must be >= 0, got {self.max_iterations}")


@dataclass
class Gradient:
    """d(error)/d(parameter), shaped exactly like the network it came from."""

    weights: list[np.ndarray]
    thresholds: list[np.ndarray]

    def to_flat(self) -> np.ndarray:
        return _flatten_layers(self.weights, self.thresholds)


@dataclass
class TrainLog:
    """Per-iteration (or per-epoch) trace of a training run.

    Rows are (iteration, error, mu_or_eta, accepted); row 0 records the
    initial evaluation.  ``reason`` is one of goal / max_iter / stalled /
    diverged.
    """

    rows: list[tuple[int, float, float, int]]
    reason: str

    @property
    def final_error(self) -> float:
        return self.rows[-1][1]

    @property
    def accepted_errors(self) -> list[float]:
        return [r[1] for r in self.rows if r[3] == 1]

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "error", "mu_or_eta", "accepted"])
            for iteration, error, knob, accepted in self.rows:
                writer.writerow([iteration, repr(float(error)), repr(float(knob)), accepted])
            fh.write(f"# termination_reason = {self.reason}\n")


def error_sse(target, output) -> float:
    """Half the summed squared difference between target and output."""
    t = np.asarray(target, dtype=np.float64)
    z = np.asarray(output, dtype=np.float64)
    if t.shape != z.shape:
        raise StructuralError(f"target shape {t.shape} != output shape {z.shape}")
    diff = t - z
    return 0.5 * float(np.dot(diff.ravel(), diff.ravel()))


def total_error(weights: NetworkWeights, patterns) -> float:
    """Summed squared-error over a whole pattern set (the stopping quantity)."""
    x, t = as_pattern_arrays(patterns)
    z = network_outputs(weights, x)
    diff = t - z
    return 0.5 * float(np.dot(diff.ravel(), diff.ravel()))


def _error_goal(config, n_patterns: int, n_outputs: int) -> float:
    # theta is per pattern and output; the stopping rule compares the
    # summed error, so scale it up by the dataset size.
    return config.theta * n_patterns * n_outputs


def backprop_gradient(weights: NetworkWeights, pattern) -> Gradient:
    """Exact d(error)/d(parameter) for one pattern.

    The output sensitivity is (t - z) * f'(net); hidden sensitivities are
    pulled back through the weights layer by layer.  The returned gradient
    is the one a step of -eta * gradient descends.
    """
    x, t = pattern
    trace = forward(weights, x)
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    z = trace.output
    if t.shape != z.shape:
        raise StructuralError(f"target shape {t.shape} != output shape {z.shape}")
    acts = [trace.inputs] + trace.activations
    n_layers = len(weights.weights)
    grads_w = [None] * n_layers
    grads_b = [None] * n_layers
    delta = (t - z) * activation_derivative(z)
    for layer in reversed(range(n_layers)):
        if not np.all(np.isfinite(delta)):
            raise NumericalError(f"non-finite sensitivity in layer {layer}")
        grads_w[layer] = -np.outer(delta, acts[layer])
        grads_b[layer] = -delta
        if layer > 0:
            delta = (weights.weights[layer].T @ delta) * activation_derivative(acts[layer])
    return Gradient(grads_w, grads_b)


def _apply_flat_step(weights: NetworkWeights, step: np.ndarray) -> NetworkWeights:
    return NetworkWeights.from_flat(weights.topology, weights.to_flat() + step)


def train_gd(weights: NetworkWeights, patterns, config: GdConfig, rng=None):
    """Per-pattern gradient descent with a seeded shuffle each epoch.

    Returns (trained weights, TrainLog).  Stops on the error goal, the
    epoch limit, or divergence (epoch error non-finite or > 1e12).
    """
    x, t = as_pattern_arrays(patterns)
    rng = as_rng(rng)
    n, c = t.shape
    goal = _error_goal(config, n, c)
    w = weights.copy()
    flat = w.to_flat()
    error = total_error(w, (x, t))
    rows = [(0, error, config.eta, 1)]
    epoch = 0
    while True:
        if not np.isfinite(error) or error > DIVERGENCE_LIMIT:
            reason = REASON_DIVERGED
            break
        if error < goal:
            reason = REASON_GOAL
            break
        if epoch >= config.max_epochs:
            reason = REASON_MAX_ITER
            break
        blown_up = False
        for p in rng.permutation(n):
            grad = backprop_gradient(w, TrainingPattern(x[p], t[p]))
            flat = flat - config.eta * grad.to_flat()
            if not np.all(np.isfinite(flat)):
                blown_up = True
                break
            w = NetworkWeights.from_flat(w.topology, flat)
        epoch += 1
        error = np.inf if blown_up else total_error(w, (x, t))
        rows.append((epoch, error, config.eta, 1))
        if blown_up:
            reason = REASON_DIVERGED
            break
    return w, TrainLog(rows, reason)


def jacobian(weights: NetworkWeights, patterns):
    """Residual Jacobian over a pattern set.

    Returns (J, e) where e stacks the residuals t - z row-major by
    (pattern, output) and J[r, col] = d e_r / d parameter_col, columns in
    the canonical flattening order.  Computed with one unit-seeded
    backward pass per output, vectorized over patterns - a separate code
    path from backprop_gradient, so the J^T e identity is a real check.
    """
    x, t = as_pattern_arrays(patterns)
    pre, acts_list = forward_batch(weights, x)
    z = acts_list[-1]
    if t.shape != z.shape:
        raise StructuralError(f"target shape {t.shape} != output shape {z.shape}")
    acts = [x] + acts_list
    n, c = t.shape
    n_layers = len(weights.weights)
    n_params = weights.topology.parameter_count
    jac = np.empty((n * c, n_params))
    residuals = (t - z).reshape(-1)
    for k in range(c):
        delta = np.zeros((n, c))
        delta[:, k] = activation_derivative(z[:, k])
        blocks = [None] * n_layers
        for layer in reversed(range(n_layers)):
            if not np.all(np.isfinite(delta)):
                raise NumericalError(f"non-finite sensitivity in layer {layer}")
            dz_dw = np.einsum("pj,pi->pji", delta, acts[layer])
            blocks[layer] = np.concatenate([dz_dw, delta[:, :, None]], axis=2).reshape(n, -1)
            if layer > 0:
                delta = (delta @ weights.weights[layer]) * activation_derivative(acts[layer])
        jac[k::c] = -np.concatenate(blocks, axis=1)
    return jac, residuals


def solve_damped(gram: np.ndarray, grad: np.ndarray, mu: float) -> np.ndarray:
    """Solve (J^T J + mu I) d = grad by Cholesky and return the step -d."""
    if not mu > 0.0:
        raise StructuralError(f"mu must be > 0, got {mu}")
    a = gram.copy()
    a.flat[:: a.shape[0] + 1] += mu
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
        d = scipy.linalg.cho_solve(factor, grad, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"damped normal equations not solvable at mu={mu}: {exc}") from exc
    return -d


def lm_step(weights: NetworkWeights, patterns, mu: float) -> NetworkWeights:
    """One damped Gauss-Newton candidate from the current weights.

    The gradient of the summed error is J^T e; the step solves
    (J^T J + mu I) d = J^T e and moves by -d, so small mu approaches the
    Gauss-Newton step and large mu a short gradient step.
    """
    jac, residuals = jacobian(weights, patterns)
    step = solve_damped(jac.T @ jac, jac.T @ residuals, mu)
    return _apply_flat_step(weights, step)


def train_lm(weights: NetworkWeights, patterns, config: LmConfig):
    """Full-batch damped Gauss-Newton training.

    Candidates that reduce the total error are accepted (mu /= beta);
    others are rejected with the weights kept (mu *= beta).  A tie counts
    as not reduced.  Accepted-step errors are strictly decreasing by
    construction, which is re-asserted before returning.
    """
    x, t = as_pattern_arrays(patterns)
    n, c = t.shape
    goal = _error_goal(config, n, c)
    w = weights.copy()
    error = total_error(w, (x, t))
    rows = [(0, error, config.mu0, 1)]
    mu = config.mu0
    iteration = 0
    gram = grad = None
    while True:
        if not np.isfinite(error) or error > DIVERGENCE_LIMIT:
            reason = REASON_DIVERGED
            break
        if error < goal:
            reason = REASON_GOAL
            break
        if iteration >= config.max_iterations:
            reason = REASON_MAX_ITER
            break
        if mu > config.mu_max:
            reason = REASON_STALLED
            break
        if gram is None:
            # The Jacobian only changes when a step is accepted; rejected
            # retries at larger mu reuse the factorization inputs.
            jac, residuals = jacobian(w, (x, t))
            gram = jac.T @ jac
            grad = jac.T @ residuals
        mu_used = mu
        try:
            candidate = _apply_flat_step(w, solve_damped(gram, grad, mu))
            candidate_error = total_error(candidate, (x, t))
        except NumericalError:
            # mu below the Gram matrix's roundoff floor can leave the
            # damped system numerically indefinite; more damping always
            # restores solvability, so count it as a rejected step.
            candidate_error = np.nan
        iteration += 1
        if np.isfinite(candidate_error) and candidate_error < error:
            w, error = candidate, candidate_error
            mu = mu / config.beta
            gram = grad = None
            rows.append((iteration, error, mu_used, 1))
        else:
            mu = mu * config.beta
            rows.append((iteration, error, mu_used, 0))
    log = TrainLog(rows, reason)
    accepted = log.accepted_errors
    if any(b >= a for a, b in zip(accepted, accepted[1:])):
        raise NumericalError("accepted-error sequence is not strictly decreasing")
    return w, log
