import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpface import mlp
from lpface.errors import InvalidInputError, TrainingDivergedError
from lpface.mlp import Hyperparams, Network, TrainState

XOR_X = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=float)
XOR_D = np.array([[-1], [1], [1], [-1]], dtype=float)


def scalar_net(w, b=0.0):
    return Network([np.array([[w]], dtype=float)], [np.array([b], dtype=float)])


def identity_net(n):
    return Network([np.eye(n)], [np.zeros(n)])


def finite_difference(net, x, d, h=1e-6):
    out = []
    for param in net.params():
        grad = np.zeros_like(param)
        for idx in np.ndindex(param.shape):
            keep = param[idx]
            param[idx] = keep + h
            up = mlp.batch_error(net, x, d)
            param[idx] = keep - h
            down = mlp.batch_error(net, x, d)
            param[idx] = keep
            grad[idx] = (up - down) / (2 * h)
        out.append(grad)
    return out


class TestInit:
    def test_deterministic(self):
        assert mlp.init_network([4, 3, 2], seed=7) == mlp.init_network([4, 3, 2], seed=7)

    def test_seed_matters(self):
        assert mlp.init_network([4, 3, 2], seed=1) != mlp.init_network([4, 3, 2], seed=2)

    def test_bounds_and_zero_biases(self):
        net = mlp.init_network([4, 16, 9], seed=0)
        assert np.all(np.abs(net.weights[0]) <= 0.5)
        assert np.all(np.abs(net.weights[1]) <= 0.25)
        assert all(not b.any() for b in net.biases)
        assert net.layer_sizes == [4, 16, 9]

    @pytest.mark.parametrize("sizes", [[3], [3, 0], [0, 2], []])
    def test_invalid_sizes(self, sizes):
        with pytest.raises(InvalidInputError):
            mlp.init_network(sizes)


class TestForward:
    def test_zero_network(self):
        net = Network([np.zeros((3, 2)), np.zeros((2, 3))], [np.zeros(3), np.zeros(2)])
        out, acts = mlp.forward(net, [0.3, -2.0])
        np.testing.assert_array_equal(out, [0.0, 0.0])
        assert len(acts) == 3

    def test_scalar_tanh(self):
        out, _ = mlp.forward(scalar_net(1.0), [0.5])
        assert out[0] == pytest.approx(float(mpmath.tanh(mpmath.mpf("0.5"))), abs=1e-15)
        assert out[0] == pytest.approx(0.46212, abs=1e-5)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=3, max_size=3))
    def test_output_inside_open_interval(self, x):
        net = mlp.init_network([3, 5, 2], seed=0)
        out, _ = mlp.forward(net, x)
        assert np.all(np.abs(out) <= 1)

    def test_small_inputs_stay_strictly_inside(self):
        net = mlp.init_network([3, 5, 2], seed=0)
        out, _ = mlp.forward(net, np.random.default_rng(0).normal(size=(50, 3)))
        assert np.all(np.abs(out) < 1)

    def test_batch_matches_single(self):
        net = mlp.init_network([3, 4, 2], seed=3)
        x = np.random.default_rng(1).normal(size=(5, 3))
        batch, _ = mlp.forward(net, x)
        for row, expected in zip(x, batch):
            np.testing.assert_allclose(mlp.forward(net, row)[0], expected, rtol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            mlp.forward(mlp.init_network([3, 2]), [1.0, 2.0])


class TestError:
    def test_single_pattern(self):
        net = Network([np.zeros((2, 1))], [np.zeros(2)])
        assert mlp.batch_error(net, [[0.0]], [[1.0, 0.0]]) == 0.5

    def test_additive_over_patterns(self):
        net = Network([np.zeros((2, 1))], [np.zeros(2)])
        assert mlp.batch_error(net, [[0.0], [3.0]], [[1.0, 0.0], [0.0, -1.0]]) == 1.0

    def test_perfect_fit(self):
        net = scalar_net(1.0)
        x = np.array([[0.2], [-0.4]])
        assert mlp.batch_error(net, x, np.tanh(x)) == 0.0

    def test_empty_batch(self):
        with pytest.raises(InvalidInputError):
            mlp.batch_error(scalar_net(1.0), np.zeros((0, 1)), np.zeros((0, 1)))

    def test_one_hot(self):
        np.testing.assert_array_equal(mlp.one_hot_targets([2, 0], 3), [[-1, -1, 1], [1, -1, -1]])
        with pytest.raises(InvalidInputError):
            mlp.one_hot_targets([3], 3)


class TestBackward:
    def test_zero_at_perfect_fit(self):
        net = mlp.init_network([2, 3, 1], seed=0)
        x = np.array([[0.1, 0.2], [0.3, -0.5]])
        grads = mlp.backward(net, x, mlp.forward(net, x)[0])
        assert all(not g.any() for g in grads)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        sizes = list(rng.integers(1, 5, size=rng.integers(2, 5)))
        net = mlp.init_network(sizes, seed=seed)
        x = rng.normal(size=(3, sizes[0]))
        d = rng.uniform(-1, 1, size=(3, sizes[-1]))
        for analytic, numeric in zip(mlp.backward(net, x, d), finite_difference(net, x, d)):
            denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-7)
            assert np.max(np.abs(analytic - numeric) / denom) < 1e-5

    def test_batch_is_sum_of_patterns(self):
        net = mlp.init_network([3, 4, 2], seed=5)
        rng = np.random.default_rng(5)
        x, d = rng.normal(size=(4, 3)), rng.uniform(-1, 1, size=(4, 2))
        total = mlp.backward(net, x, d)
        parts = [mlp.backward(net, x[k:k + 1], d[k:k + 1]) for k in range(4)]
        for i, g in enumerate(total):
            np.testing.assert_allclose(g, sum(p[i] for p in parts), rtol=1e-12, atol=1e-15)


class TestUpdate:
    def test_momentum_step(self):
        net = scalar_net(0.0)
        state = TrainState([np.array([[0.02]]), np.array([0.02])], [np.zeros((1, 1)), np.zeros(1)],
                           [np.array([[0.1]]), np.zeros(1)])
        mlp.update_weights(net, [np.array([[1.0]]), np.zeros(1)], state, Hyperparams())
        assert state.delta_prev[0][0, 0] == pytest.approx(0.07, abs=1e-15)
        assert net.weights[0][0, 0] == pytest.approx(0.07, abs=1e-15)

    def _one(self, eta, lbar, grad, **hp):
        net = scalar_net(0.0)
        state = TrainState([np.array([[eta]]), np.array([eta])], [np.array([[lbar]]), np.zeros(1)],
                           [np.zeros((1, 1)), np.zeros(1)])
        mlp.update_weights(net, [np.array([[grad]]), np.zeros(1)], state, Hyperparams(**hp))
        return state.eta[0][0, 0], state.lambda_bar[0][0, 0]

    def test_agreeing_signs_increase_linearly(self):
        eta, lbar = self._one(0.02, 0.5, 0.2)
        assert eta == pytest.approx(0.021, abs=1e-15)
        assert lbar == pytest.approx(0.41, abs=1e-15)

    def test_disagreeing_signs_decrease_geometrically(self):
        eta, _ = self._one(0.02, 0.5, -0.2)
        assert eta == pytest.approx(0.01, abs=1e-15)
        assert eta > 0

    def test_zero_history_leaves_rate(self):
        eta, lbar = self._one(0.02, 0.0, 0.3)
        assert eta == 0.02
        assert lbar == pytest.approx(0.09, abs=1e-15)

    def test_rates_stay_positive(self):
        rng = np.random.default_rng(0)
        net = mlp.init_network([3, 4, 2], seed=0)
        hp = Hyperparams(b=0.9)
        state = TrainState.fresh(net, hp.eta0)
        for _ in range(10_000):
            grads = [rng.normal(size=p.shape) * 1e-3 for p in net.params()]
            mlp.update_weights(net, grads, state, hp)
        assert all(np.all(e > 0) for e in state.eta)

    def test_shape_mismatch(self):
        net = scalar_net(0.0)
        with pytest.raises(InvalidInputError):
            mlp.update_weights(net, [np.zeros((2, 1)), np.zeros(1)], TrainState.fresh(net, 0.02), Hyperparams())


class TestTrain:
    def test_reduces_to_gradient_descent(self):
        hp = Hyperparams(a=0.0, b=0.0, alpha=0.0, max_epochs=25, goal=0.0)
        net = mlp.init_network([2, 3, 1], seed=4)
        reference = net.copy()
        mlp.train(net, XOR_X, XOR_D, hp)
        for _ in range(25):
            grads = mlp.backward(reference, XOR_X, XOR_D)
            for p, g in zip(reference.params(), grads):
                p -= hp.eta0 * g
        assert net == reference

    def test_one_epoch_is_one_update(self):
        net = mlp.init_network([2, 3, 1], seed=1)
        before = net.copy()
        run = mlp.train(net, XOR_X, XOR_D, Hyperparams(max_epochs=1))
        assert run.epochs == 1 and len(run.errors) == 1
        assert run.errors[0] == mlp.batch_error(before, XOR_X, XOR_D)
        assert net != before

    def test_deterministic(self):
        runs = [mlp.train(mlp.init_network([2, 4, 1], seed=3), XOR_X, XOR_D, Hyperparams(max_epochs=300))
                for _ in range(2)]
        assert runs[0].errors == runs[1].errors
        assert runs[0].network == runs[1].network

    def test_stop_on_e_max(self):
        run = mlp.train(mlp.init_network([2, 4, 1], seed=0), XOR_X, XOR_D, Hyperparams(e_max=10.0))
        assert (run.stop_reason, run.epochs) == ("e_max", 0)

    def test_stop_on_goal(self):
        net = scalar_net(1.0)
        x = np.array([[0.3]])
        run = mlp.train(net, x, np.tanh(x), Hyperparams())
        assert run.stop_reason == "goal"

    def test_xor(self):
        hits = 0
        for seed in range(5):
            run = mlp.train(mlp.init_network([2, 4, 1], seed), XOR_X, XOR_D, Hyperparams(max_epochs=5000))
            hits += min(run.errors + [run.final_error]) < 0.01
        assert hits >= 4

    def test_divergence_reports_epoch(self):
        net = mlp.init_network([2, 3, 1], seed=0)
        x = XOR_X.copy()
        x[0, 0] = np.inf
        with pytest.raises(TrainingDivergedError) as info:
            mlp.train(net, x, XOR_D, Hyperparams(max_epochs=5))
        assert info.value.epoch == 1

    @pytest.mark.parametrize("norm,scale", [("sum", 1.0), ("mean", 0.25), ("mse", 0.5)])
    def test_error_norm_scales_gradient(self, norm, scale):
        assert Hyperparams(error_norm=norm).gradient_scale(4, 1) == scale

    @pytest.mark.parametrize("kwargs", [{"eta0": 0}, {"alpha": 1.5}, {"b": 1.0}, {"c": -0.1},
                                        {"max_epochs": 0}, {"goal": -1}, {"error_norm": "l1"}])
    def test_invalid_hyperparams(self, kwargs):
        with pytest.raises(InvalidInputError):
            Hyperparams(**kwargs)


class TestClassify:
    @pytest.mark.parametrize("scores,expected", [([0.1, 0.9, -0.3], 1), ([0.2, 0.2, 0.2], 0), ([-0.5, 0.0, 0.5], 2)])
    def test_argmax(self, scores, expected):
        cls, out = mlp.classify(identity_net(3), scores)
        assert cls == expected
        np.testing.assert_allclose(out, np.tanh(scores))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            mlp.classify(identity_net(3), [0.0, 1.0])
