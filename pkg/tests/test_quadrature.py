import math

import pytest

from darboux.quadrature import (central_derivative, grid_derivative,
                                integrate_sqrt_endpoints)


def test_plain_interval():
    val = integrate_sqrt_endpoints(math.sin, 0.0, math.pi)
    assert abs(val - 2.0) < 1e-12


def test_inverse_sqrt_left():
    val = integrate_sqrt_endpoints(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0,
                                   singular_left=True)
    assert abs(val - 2.0) < 1e-11


def test_inverse_sqrt_right():
    val = integrate_sqrt_endpoints(lambda x: 1.0 / math.sqrt(1.0 - x), 0.0, 1.0,
                                   singular_right=True)
    assert abs(val - 2.0) < 1e-11


def test_both_singular_beta_integral():
    # int_0^1 dx / sqrt(x (1-x)) = pi
    val = integrate_sqrt_endpoints(lambda x: 1.0 / math.sqrt(x * (1.0 - x)),
                                   0.0, 1.0, True, True)
    assert abs(val - math.pi) < 1e-10


def test_reduced_integrand_keeps_full_precision():
    # same integral, cancellation-free form f(x) sqrt(x) = 1/sqrt(1-x)
    val = integrate_sqrt_endpoints(
        lambda x: 1.0 / math.sqrt(x * (1.0 - x)), 0.0, 1.0, True, True,
        reduced_left=lambda x: 1.0 / math.sqrt(1.0 - x),
        reduced_right=lambda x: 1.0 / math.sqrt(x))
    assert abs(val - math.pi) < 1e-13


def test_substitution_on_regular_endpoint():
    val = integrate_sqrt_endpoints(lambda x: math.sqrt(x), 0.0, 1.0, True, True)
    assert abs(val - 2.0 / 3.0) < 1e-11


def test_empty_and_reversed_interval():
    assert integrate_sqrt_endpoints(math.sin, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        integrate_sqrt_endpoints(math.sin, 1.0, 0.0)


def test_central_derivative_richardson():
    d = central_derivative(math.sin, 0.7, 1e-4)
    assert abs(d - math.cos(0.7)) < 1e-12
    d2 = central_derivative(math.sin, 0.7, 1e-3, order=2)
    assert abs(d2 + math.sin(0.7)) < 1e-8


def test_grid_derivative_orders():
    import numpy as np
    x = np.linspace(0.0, 3.0, 900)
    h = x[1] - x[0]
    assert np.max(np.abs(grid_derivative(np.sin(x), h) - np.cos(x))[4:-4]) < 1e-9
    assert np.max(np.abs(grid_derivative(np.sin(x), h, order=2) + np.sin(x))[4:-4]) < 1e-6
