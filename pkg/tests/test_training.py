"""Error function, gradient checks, and both trainers."""

import numpy as np
import pytest

from specpredict import network, training
from specpredict.errors import NumericalError, StructuralError

XOR_INPUTS = np.array([[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]])
XOR_TARGETS = np.array([[-1.0], [1.0], [1.0], [-1.0]])


def random_case(rng, max_inputs=5, max_hidden=8, max_outputs=2):
    order = int(rng.integers(1, max_inputs + 1))
    hidden = int(rng.integers(1, max_hidden + 1))
    outputs = int(rng.integers(1, max_outputs + 1))
    topo = network.NetworkTopology(order, (hidden,), outputs)
    w = network.init_random(topo, (-1.0, 1.0), rng)
    x = rng.uniform(-1.0, 1.0, size=order)
    t = rng.uniform(-1.0, 1.0, size=outputs)
    return w, x, t


def fd_gradient(w, x, t, step=1e-6):
    """Central-difference d(error)/d(parameter), one coordinate at a time."""
    flat = w.to_flat()
    out = np.empty_like(flat)
    for i in range(flat.size):
        plus, minus = flat.copy(), flat.copy()
        plus[i] += step
        minus[i] -= step
        z_plus = network.forward(network.NetworkWeights.from_flat(w.topology, plus), x).output
        z_minus = network.forward(network.NetworkWeights.from_flat(w.topology, minus), x).output
        out[i] = (training.error_sse(t, z_plus) - training.error_sse(t, z_minus)) / (2.0 * step)
    return out


class TestErrorSse:
    def test_perfect_output_scores_zero(self):
        assert training.error_sse([1.0, -1.0], [1.0, -1.0]) == 0.0

    def test_unit_gap_per_output(self):
        assert training.error_sse([1.0, -1.0], [0.0, 0.0]) == 1.0

    def test_half_squared_gap(self):
        z = network.activation(2.0)
        np.testing.assert_allclose(training.error_sse([1.0], [z]), 0.5 * (1.0 - z) ** 2, rtol=0)
        np.testing.assert_allclose(training.error_sse([1.0], [z]), 0.028419, atol=1e-6)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(StructuralError):
            training.error_sse([1.0, 1.0], [1.0])


class TestAsPatternArrays:
    def test_accepts_array_pair(self):
        x, t = training.as_pattern_arrays((XOR_INPUTS, XOR_TARGETS))
        assert x.shape == (4, 2) and t.shape == (4, 1)

    def test_accepts_pair_sequence(self):
        pairs = [(XOR_INPUTS[i], XOR_TARGETS[i]) for i in range(4)]
        x, t = training.as_pattern_arrays(pairs)
        np.testing.assert_array_equal(x, XOR_INPUTS)
        np.testing.assert_array_equal(t, XOR_TARGETS)

    def test_accepts_dataset_like_object(self):
        class Holder:
            inputs = XOR_INPUTS
            targets = XOR_TARGETS

        x, t = training.as_pattern_arrays(Holder())
        np.testing.assert_array_equal(t, XOR_TARGETS)

    def test_one_dimensional_targets_get_a_column(self):
        x, t = training.as_pattern_arrays((XOR_INPUTS, XOR_TARGETS[:, 0]))
        assert t.shape == (4, 1)

    def test_rejects_empty_and_out_of_range(self):
        with pytest.raises(StructuralError):
            training.as_pattern_arrays([])
        with pytest.raises(StructuralError):
            training.as_pattern_arrays((XOR_INPUTS, XOR_TARGETS * 2.0))
        with pytest.raises(StructuralError):
            training.as_pattern_arrays((XOR_INPUTS, XOR_TARGETS * np.nan))


class TestConfigs:
    def test_gd_validation(self):
        with pytest.raises(StructuralError):
            training.GdConfig(eta=-0.1)
        with pytest.raises(StructuralError):
            training.GdConfig(theta=0.0)
        with pytest.raises(StructuralError):
            training.GdConfig(mode="batch")

    def test_lm_validation(self):
        with pytest.raises(StructuralError):
            training.LmConfig(mu0=0.0)
        with pytest.raises(StructuralError):
            training.LmConfig(beta=1.0)
        with pytest.raises(StructuralError):
            training.LmConfig(mu_max=1e-4)
        with pytest.raises(StructuralError):
            training.LmConfig(max_iterations=-1)


class TestBackpropGradient:
    def test_zero_residual_gives_zero_gradient(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(3,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(5))
        x = np.array([0.5, -0.5])
        t = network.forward(w, x).output.copy()
        grad = training.backprop_gradient(w, (x, t))
        np.testing.assert_array_equal(grad.to_flat(), np.zeros(topo.parameter_count))

    def test_single_neuron_hand_values(self):
        # z = f(0) = 0, sensitivity = (t - z) f'(0) = 0.5, gradient = -0.5
        # for both the weight (input 1) and the threshold.
        topo = network.NetworkTopology(order=1, hidden_sizes=(), output_size=1)
        w = network.NetworkWeights.zeros(topo)
        grad = training.backprop_gradient(w, (np.array([1.0]), np.array([1.0])))
        np.testing.assert_allclose(grad.to_flat(), [-0.5, -0.5], rtol=0)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(123)
        for _ in range(10):
            w, x, t = random_case(rng)
            bp = training.backprop_gradient(w, (x, t)).to_flat()
            np.testing.assert_allclose(bp, fd_gradient(w, x, t), rtol=1e-6, atol=1e-8)

    def test_descent_direction_reduces_error(self):
        rng = np.random.default_rng(17)
        w, x, t = random_case(rng)
        grad = training.backprop_gradient(w, (x, t)).to_flat()
        if not np.any(grad):
            pytest.skip("degenerate draw with zero gradient")
        before = training.error_sse(t, network.forward(w, x).output)
        stepped = network.NetworkWeights.from_flat(w.topology, w.to_flat() - 1e-3 * grad)
        after = training.error_sse(t, network.forward(stepped, x).output)
        assert after < before


class TestTrainGd:
    def test_goal_already_met(self):
        topo = network.NetworkTopology(order=1, hidden_sizes=(), output_size=1)
        w = network.NetworkWeights.zeros(topo)
        x = np.array([[1.0]])
        t = network.network_outputs(w, x).copy()
        trained, log = training.train_gd(w, (x, t), training.GdConfig())
        assert log.reason == training.REASON_GOAL
        assert len(log.rows) == 1
        np.testing.assert_array_equal(trained.to_flat(), w.to_flat())

    def test_epoch_errors_decrease_on_learnable_task(self):
        # A single neuron can represent these targets exactly (w=1.5, b=0).
        topo = network.NetworkTopology(order=1, hidden_sizes=(), output_size=1)
        w = network.NetworkWeights(topo, [np.array([[0.2]])], [np.array([0.1])])
        x = np.array([[-2.0], [-1.0], [0.5], [1.0], [2.0]])
        t = network.activation(1.5 * x)
        _, log = training.train_gd(
            w, (x, t), training.GdConfig(eta=0.5, theta=1e-6, max_epochs=10),
            np.random.default_rng(0),
        )
        errors = [row[1] for row in log.rows]
        assert all(b < a for a, b in zip(errors, errors[1:]))

    def test_zero_eta_is_a_fixed_point(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(2,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(8))
        _, log = training.train_gd(
            w, (XOR_INPUTS, XOR_TARGETS),
            training.GdConfig(eta=0.0, max_epochs=3), np.random.default_rng(0),
        )
        assert log.reason == training.REASON_MAX_ITER
        errors = [row[1] for row in log.rows]
        assert errors == [errors[0]] * len(errors)

    def test_infinite_eta_diverges(self):
        topo = network.NetworkTopology(order=1, hidden_sizes=(), output_size=1)
        w = network.NetworkWeights.zeros(topo)
        x = np.array([[1.0]])
        t = np.array([[1.0]])
        trained, log = training.train_gd(
            w, (x, t), training.GdConfig(eta=np.inf, max_epochs=5), np.random.default_rng(0)
        )
        assert log.reason == training.REASON_DIVERGED
        assert not np.isfinite(log.final_error)
        assert trained.all_finite()

    def test_seeded_shuffle_reproduces(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(3,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(12))
        runs = [
            training.train_gd(
                w, (XOR_INPUTS, XOR_TARGETS),
                training.GdConfig(eta=0.3, max_epochs=20), np.random.default_rng(99),
            )
            for _ in range(2)
        ]
        np.testing.assert_array_equal(runs[0][0].to_flat(), runs[1][0].to_flat())
        assert runs[0][1].rows == runs[1][1].rows


class TestJacobian:
    def test_shape_and_zero_residual(self):
        topo = network.NetworkTopology(order=3, hidden_sizes=(4,), output_size=2)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(6))
        x = np.random.default_rng(7).uniform(-1.0, 1.0, size=(5, 3))
        t = network.network_outputs(w, x)
        jac, residuals = training.jacobian(w, (x, t))
        assert jac.shape == (10, topo.parameter_count)
        np.testing.assert_array_equal(residuals, np.zeros(10))

    def test_single_neuron_entries(self):
        # One row: e = t - z = 1, de/dw = -f'(0) * x = -0.5, de/db = -0.5.
        topo = network.NetworkTopology(order=1, hidden_sizes=(), output_size=1)
        w = network.NetworkWeights.zeros(topo)
        jac, residuals = training.jacobian(w, (np.array([[1.0]]), np.array([[1.0]])))
        np.testing.assert_allclose(jac, [[-0.5, -0.5]], rtol=0)
        np.testing.assert_array_equal(residuals, [1.0])

    def test_rows_interleave_by_pattern_then_output(self):
        rng = np.random.default_rng(31)
        topo = network.NetworkTopology(order=2, hidden_sizes=(3,), output_size=2)
        w = network.init_random(topo, (-1.0, 1.0), rng)
        x = rng.uniform(-1.0, 1.0, size=(4, 2))
        t = rng.uniform(-1.0, 1.0, size=(4, 2))
        _, residuals = training.jacobian(w, (x, t))
        z = network.network_outputs(w, x)
        np.testing.assert_allclose(residuals, (t - z).reshape(-1), rtol=1e-13)

    def test_gradient_identity_against_backprop(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            order = int(rng.integers(1, 5))
            hidden = int(rng.integers(1, 7))
            outputs = int(rng.integers(1, 3))
            n = int(rng.integers(1, 9))
            topo = network.NetworkTopology(order, (hidden,), outputs)
            w = network.init_random(topo, (-1.0, 1.0), rng)
            x = rng.uniform(-1.0, 1.0, size=(n, order))
            t = rng.uniform(-1.0, 1.0, size=(n, outputs))
            jac, residuals = training.jacobian(w, (x, t))
            summed = sum(
                training.backprop_gradient(w, (x[i], t[i])).to_flat() for i in range(n)
            )
            np.testing.assert_allclose(jac.T @ residuals, summed, atol=1e-10)


class TestSolveDamped:
    def test_scalar_oracle(self):
        # (1 + mu) d = -1 so the returned step is 1 / (1 + mu).
        step = training.solve_damped(np.array([[1.0]]), np.array([-1.0]), 1e-12)
        np.testing.assert_allclose(step, [1.0], atol=1e-9)

    def test_heavy_damping_shrinks_the_step(self):
        step = training.solve_damped(np.array([[1.0]]), np.array([-1.0]), 1e6)
        np.testing.assert_allclose(step, [1.0 / (1.0 + 1e6)], rtol=1e-12)

    def test_mu_must_be_positive(self):
        with pytest.raises(StructuralError):
            training.solve_damped(np.eye(2), np.ones(2), 0.0)

    def test_indefinite_system_raises(self):
        gram = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(NumericalError):
            training.solve_damped(gram, np.ones(2), 0.5)


class TestLmStep:
    def test_zero_residual_leaves_weights_alone(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(3,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(14))
        x = np.random.default_rng(15).uniform(-1.0, 1.0, size=(6, 2))
        t = network.network_outputs(w, x)
        stepped = training.lm_step(w, (x, t), 1e-3)
        np.testing.assert_allclose(stepped.to_flat(), w.to_flat(), atol=1e-12)

    def test_step_norm_shrinks_with_damping(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(4,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(16))
        patterns = (XOR_INPUTS, XOR_TARGETS)
        norms = [
            float(np.linalg.norm(training.lm_step(w, patterns, mu).to_flat() - w.to_flat()))
            for mu in (1e-3, 1.0, 1e3, 1e6)
        ]
        assert all(b <= a for a, b in zip(norms, norms[1:]))

    def test_moderate_step_reduces_xor_error(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(4,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(18))
        patterns = (XOR_INPUTS, XOR_TARGETS)
        before = training.total_error(w, patterns)
        after = training.total_error(training.lm_step(w, patterns, 1.0), patterns)
        assert after < before


class TestTrainLm:
    def test_goal_already_met(self):
        topo = network.NetworkTopology(order=1, hidden_sizes=(), output_size=1)
        w = network.NetworkWeights.zeros(topo)
        x = np.array([[1.0]])
        t = network.network_outputs(w, x).copy()
        trained, log = training.train_lm(w, (x, t), training.LmConfig())
        assert log.reason == training.REASON_GOAL
        assert len(log.rows) == 1
        np.testing.assert_array_equal(trained.to_flat(), w.to_flat())

    def test_learns_xor_for_most_seeds(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(4,), output_size=1)
        config = training.LmConfig(theta=0.0025, max_iterations=200)
        reached = 0
        for seed in range(20):
            w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(seed))
            _, log = training.train_lm(w, (XOR_INPUTS, XOR_TARGETS), config)
            if log.final_error < 0.01:
                reached += 1
        assert reached >= 15

    def test_accepted_errors_strictly_decrease(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(4,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(2))
        _, log = training.train_lm(
            w, (XOR_INPUTS, XOR_TARGETS), training.LmConfig(theta=1e-8, max_iterations=60)
        )
        accepted = log.accepted_errors
        assert len(accepted) > 2
        assert all(b < a for a, b in zip(accepted, accepted[1:]))

    def test_mu_moves_by_beta_per_outcome(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(4,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(3))
        config = training.LmConfig(beta=10.0, theta=1e-8, max_iterations=40)
        _, log = training.train_lm(w, (XOR_INPUTS, XOR_TARGETS), config)
        for prev, cur in zip(log.rows[1:], log.rows[2:]):
            factor = 1.0 / config.beta if prev[3] == 1 else config.beta
            np.testing.assert_allclose(cur[2], prev[2] * factor, rtol=1e-12)

    def test_stalls_when_no_step_helps(self):
        # Symmetric targets make the zero network a stationary point with
        # nonzero error: every candidate ties, mu climbs past the ceiling.
        topo = network.NetworkTopology(order=1, hidden_sizes=(), output_size=1)
        w = network.NetworkWeights.zeros(topo)
        x = np.array([[1.0], [1.0]])
        t = np.array([[1.0], [-1.0]])
        _, log = training.train_lm(
            w, (x, t), training.LmConfig(mu0=1e-3, beta=10.0, mu_max=1.0, theta=1e-4)
        )
        assert log.reason == training.REASON_STALLED
        assert all(row[3] == 0 for row in log.rows[1:])

    def test_iteration_budget_respected(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(4,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(4))
        _, log = training.train_lm(
            w, (XOR_INPUTS, XOR_TARGETS), training.LmConfig(theta=1e-12, max_iterations=7)
        )
        assert log.reason == training.REASON_MAX_ITER
        assert log.rows[-1][0] == 7

    def test_zero_iterations_returns_start(self):
        topo = network.NetworkTopology(order=2, hidden_sizes=(4,), output_size=1)
        w = network.init_random(topo, (-1.0, 1.0), np.random.default_rng(5))
        trained, log = training.train_lm(
            w, (XOR_INPUTS, XOR_TARGETS), training.LmConfig(max_iterations=0)
        )
        assert log.reason == training.REASON_MAX_ITER
        np.testing.assert_array_equal(trained.to_flat(), w.to_flat())


class TestTrainLog:
    def test_csv_layout(self, tmp_path):
        log = training.TrainLog(
            rows=[(0, 2.0, 1e-3, 1), (1, 1.5, 1e-3, 1), (2, 1.5, 1e-4, 0)],
            reason=training.REASON_MAX_ITER,
        )
        path = tmp_path / "trainer_log.csv"
        log.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "iteration,error,mu_or_eta,accepted"
        assert lines[1] == "0,2.0,0.001,1"
        assert lines[-1] == "# termination_reason = max_iter"
        assert len(lines) == 5

    def test_final_error_and_accepted_sequence(self):
        log = training.TrainLog(
            rows=[(0, 2.0, 1e-3, 1), (1, 2.0, 1e-3, 0), (2, 0.5, 1e-2, 1)],
            reason=training.REASON_GOAL,
        )
        assert log.final_error == 0.5
        assert log.accepted_errors == [2.0, 0.5]
