import numpy as np
import pytest

from bgcn.core.optim import Adam, AdamState, adam_step
from bgcn.errors import ShapeError, TrainingError


class TestAdamStep:
    def test_first_step_moves_by_lr(self):
        params = np.array([1.0, -1.0])
        state = AdamState.zeros_like(params, lr=0.1)
        adam_step(params, np.array([5.0, -0.3]), state)
        # primeiro passo com correção de viés: ~lr * sinal(g)
        np.testing.assert_allclose(params, [0.9, -0.9], atol=1e-6)
        assert state.step == 1

    def test_zero_gradient_is_noop(self):
        params = np.array([[0.5, -1.5], [2.0, 0.0]])
        before = params.copy()
        adam_step(params, np.zeros_like(params), AdamState.zeros_like(params, lr=0.1))
        np.testing.assert_array_equal(params, before)

    def test_bitwise_deterministic(self):
        rng = np.random.default_rng(3)
        start, grads = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
        outputs = []
        for _ in range(2):
            params = start.copy()
            state = AdamState.zeros_like(params, lr=0.01)
            for _ in range(5):
                adam_step(params, grads, state)
            outputs.append(params)
        assert outputs[0].tobytes() == outputs[1].tobytes()

    def test_shape_mismatch(self):
        params = np.zeros(3)
        with pytest.raises(ShapeError):
            adam_step(params, np.zeros(2), AdamState.zeros_like(params))

    def test_non_finite_gradient(self):
        params = np.zeros(2)
        with pytest.raises(TrainingError):
            adam_step(params, np.array([np.inf, 0.0]), AdamState.zeros_like(params), name="P")


class TestAdam:
    def test_minimizes_quadratic(self):
        x = np.array([3.0, -2.0])
        opt = Adam({"x": x}, lr=0.05)
        for _ in range(500):
            opt.step({"x": 2 * x})
        assert np.abs(x).max() < 0.1

    def test_converges_on_shifted_quadratic(self):
        w = np.zeros(1)
        opt = Adam({"w": w}, lr=0.1)
        for _ in range(500):
            opt.step({"w": 2 * (w - 3.0)})
        assert abs(w[0] - 3.0) < 1e-2

    def test_invalid_lr(self):
        with pytest.raises(ValueError):
            Adam({"x": np.zeros(1)}, lr=0.0)

    def test_missing_grad_is_skipped(self):
        x, y = np.ones(1), np.ones(1)
        opt = Adam({"x": x, "y": y}, lr=0.1)
        opt.step({"x": np.ones(1)})
        assert x[0] < 1.0 and y[0] == 1.0
