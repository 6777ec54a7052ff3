import math

import numpy as np
import pytest

from bgcn.core.loss import bpr_loss, bpr_margin_grad, squared_norm
from bgcn.errors import ShapeError


class TestBprLoss:
    def test_equal_scores(self):
        assert bpr_loss([1.5], [1.5], {}, 0.0) == pytest.approx(math.log(2), abs=1e-12)

    def test_saturated_margin(self):
        assert bpr_loss([20.0], [0.0], {}, 0.0) < 1e-8

    def test_regularizer_only(self):
        tensors = {"P": np.array([[1.0, 1.0]]), "W": np.array([1.0, 1.0])}
        assert squared_norm(tensors) == 4.0
        assert bpr_loss([], [], tensors, 1e-3) == pytest.approx(0.004)

    def test_large_negative_margin_is_finite(self):
        value = bpr_loss([-1000.0], [0.0], {}, 0.0)
        assert value == pytest.approx(1000.0)

    def test_strictly_decreasing_in_margin(self):
        margins = np.linspace(-5, 5, 21)
        values = [bpr_loss([m], [0.0], {}, 0.0) for m in margins]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            bpr_loss([1.0, 2.0], [1.0], {}, 0.0)


def test_margin_grad_matches_sigmoid():
    x = np.array([-3.0, 0.0, 2.0])
    np.testing.assert_allclose(bpr_margin_grad(x, np.zeros(3)), -1.0 / (1.0 + np.exp(x)))
