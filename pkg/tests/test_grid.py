import math

import numpy as np
import pytest

from pdm2d.fields import AnalyticState
from pdm2d.grid import Grid2D, GridFunction, fd_derivative, fd_weights, gram_matrix, inner_product, smooth_cutoff
from pdm2d.model import ModelParams


def test_fd_weights_central():
    assert np.allclose(fd_weights((-2, -1, 0, 1, 2), 1), np.array([1, -8, 0, 8, -1]) / 12)
    assert np.allclose(fd_weights((-2, -1, 0, 1, 2), 2), np.array([-1, 16, -30, 16, -1]) / 12)


@pytest.mark.parametrize("order", [1, 2])
def test_fd_derivative_fourth_order(order):
    errs = []
    for n in (40, 80, 160):
        x = np.linspace(0.1, 2.0, n)
        h = x[1] - x[0]
        f = np.sin(3 * x) * np.exp(x)
        exact = (np.exp(x) * (np.sin(3 * x) + 3 * np.cos(3 * x)) if order == 1
                 else np.exp(x) * (-8 * np.sin(3 * x) + 6 * np.cos(3 * x)))
        errs.append(np.max(np.abs(fd_derivative(f, h, 0, order) - exact)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 3.5)


def test_fd_derivative_needs_six_nodes():
    with pytest.raises(ValueError):
        fd_derivative(np.ones(5), 0.1, 0, 1)
    with pytest.raises(ValueError):
        fd_derivative(np.ones(10), 0.1, 0, 3)


def test_uniform_quadrature_exactness():
    p = ModelParams()
    for nx in (40, 41):
        g = Grid2D.uniform_grid(p, nx, 31, 2.0)
        f = AnalyticState("poly", lambda x, y: x**2 * (2 - x) * np.cos(y))
        gf = g.sample(f)
        # int_0^2 x^2 (2-x) dx = 4/3 ; int cos over the strip = 2
        assert inner_product(gf, GridFunction(g, np.ones(g.shape))) == pytest.approx(8 / 3, rel=1e-3)


def test_gauss_legendre_integrates_gaussian():
    p = ModelParams(2.0)
    g = Grid2D.gauss_legendre(p, 8.0, panels_x=10, panels_y=4, order=8)
    vals = GridFunction(g, np.exp(-g.mesh[0] ** 2) * np.cos(p.q * g.mesh[1]) ** 2)
    one = GridFunction(g, np.ones(g.shape))
    assert inner_product(vals, one) == pytest.approx(0.5 * math.sqrt(math.pi) * p.half_width, rel=1e-12)


def test_graded_panels_handle_fractional_power():
    p = ModelParams()
    g = Grid2D.gauss_legendre(p, 1.0, panels_x=4, panels_y=1, order=10, grading=14)
    f = GridFunction(g, g.mesh[0] ** 1.4 * np.ones(g.shape))
    one = GridFunction(g, np.ones(g.shape))
    assert inner_product(f, one) == pytest.approx(math.pi / 2.4, rel=1e-12)


def test_grid_validation_and_arithmetic():
    p = ModelParams()
    with pytest.raises(ValueError):
        Grid2D.uniform_grid(p, 10, 10, -1.0)
    g = Grid2D.uniform_grid(p, 10, 8, 1.0)
    h = Grid2D.uniform_grid(p, 12, 8, 1.0)
    a = GridFunction(g, np.ones(g.shape))
    assert np.allclose((2 * a - a + 1).values, 2.0)
    with pytest.raises(ValueError):
        inner_product(a, GridFunction(h, np.ones(h.shape)))
    with pytest.raises(ValueError):
        GridFunction(g, np.ones((3, 3)))
    assert g.to_dict()["nx"] == 10 and g.hx == pytest.approx(0.1)


def test_smooth_cutoff_support():
    x = np.linspace(0, 1, 50)
    c = smooth_cutoff(x)
    assert np.all(c[:4] == 0) and np.all(c[-4:] == 0)
    assert c.max() == pytest.approx(1.0, abs=1e-2)


def test_gram_matrix_of_grid_functions():
    p = ModelParams()
    g = Grid2D.gauss_legendre(p, 3.0)
    f = GridFunction(g, np.exp(-g.mesh[0]))
    G = gram_matrix([f, 2 * f], g)
    assert G[1, 1] == pytest.approx(4 * G[0, 0]) and G[0, 1] == pytest.approx(2 * G[0, 0])
