import math

import numpy as np
import pytest

from rindlercoh.quadrature import QuadratureError, integrate_panels


def test_polynomial_exact_single_level():
    res = integrate_panels(lambda x: x**7 - 3 * x**2, -1.0, 2.0, 5.0)
    assert res.values[0] == pytest.approx((2**8 - 1) / 8 - (8 + 1), rel=1e-14)
    assert res.levels == 1


def test_oscillatory_gaussian_packet():
    k, s = 40.0, 0.7
    f = lambda x: np.exp(-x * x / (2 * s * s)) * np.cos(k * x)  # noqa: E731
    exact = math.sqrt(2 * math.pi) * s * math.exp(-0.5 * (k * s) ** 2)
    res = integrate_panels(lambda x: np.stack([f(x), np.exp(-x * x / (2 * s * s))]),
                           -10, 10, 2 * math.pi / k / 10, rtol=1e-12)
    assert abs(res.values[0] - exact) < 1e-12
    assert res.values[1] == pytest.approx(math.sqrt(2 * math.pi) * s, rel=1e-12)


def test_bisection_handles_kink():
    res = integrate_panels(lambda x: np.abs(x - 0.3), -1.0, 1.0, 1.0, rtol=1e-6)
    assert res.values[0] == pytest.approx(0.5 * (1.3**2 + 0.7**2), rel=1e-6)
    assert res.levels > 1


def test_non_convergence_reports():
    with pytest.raises(QuadratureError, match="not converged"):
        integrate_panels(lambda x: 1.0 / np.abs(x - 0.3), 0.0, 1.0, 1.0, max_levels=3)


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        integrate_panels(np.sin, 1.0, 1.0, 0.1)
