import numpy as np
import pytest

from pdm2d.fields import AnalyticState
from pdm2d.grid import Grid2D, GridFunction, inner_product
from pdm2d.model import ModelParams, psi_state
from pdm2d.operators import (OPERATOR_KINDS, apply, build_operator, first_order_operator, linear_combination,
                             operator_1d, schrodinger_operator)

P = ModelParams(1.0, 1.3, 0.5)


def bump(p, shift=0.0):
    q = p.q
    return AnalyticState(f"bump{shift}", lambda x, y: np.tanh(x * q) ** 3 * np.exp(-(x - 1.0 - shift) ** 2)
                         * np.cos(y * q) ** 2 * (1 + 0.4 * np.sin(y * q + shift)))


def quad_grid(p):
    return Grid2D.gauss_legendre(p, 8.0, panels_x=24, panels_y=6, order=10, grading=6)


def test_unknown_kind_and_missing_l():
    with pytest.raises(ValueError):
        build_operator("nope", P)
    with pytest.raises(ValueError):
        build_operator("H_l", P)
    assert "eta" in OPERATOR_KINDS


def test_coefficients_of_H_against_closed_form():
    H = build_operator("H", P)
    x, y = np.array([0.4, 1.2]), np.array([0.1, -0.3])
    q, k, v0 = P.q, P.k, P.v0
    c = H.coefficients(x, y)
    assert np.allclose(c["c_xx"], -np.cosh(q * x) ** 2)
    assert np.allclose(c["c_x"], -2 * q * np.sinh(q * x) * np.cosh(q * x))
    assert np.allclose(c["c_0"], -q * q * np.cosh(q * x) ** 2 + q * q * k * (k - 1) / np.sinh(q * x) ** 2 + q * q * v0)


@pytest.mark.parametrize("pair", [("eta", "eta_dagger")])
def test_adjointness(pair):
    eta, etad = (build_operator(s, P) for s in pair)
    g = quad_grid(P)
    f, h = bump(P), bump(P, 0.3)
    lhs = inner_product(apply(eta, f, g), g.sample(h))
    rhs = inner_product(g.sample(f), apply(etad, h, g))
    assert lhs == pytest.approx(rhs, rel=1e-6)


@pytest.mark.parametrize("kind", ["H", "H1", "R", "R1", "L"])
def test_symmetric_operators(kind):
    op = build_operator(kind, P)
    g = quad_grid(P)
    f, h = bump(P), bump(P, 0.3)
    assert inner_product(apply(op, f, g), g.sample(h)) == pytest.approx(
        inner_product(g.sample(f), apply(op, h, g)), rel=1e-6)


@pytest.mark.parametrize("kind", ["R", "R1"])
def test_R_nonnegative(kind):
    op = build_operator(kind, P)
    g = quad_grid(P)
    for shift in (0.0, 0.5, 1.5):
        f = bump(P, shift)
        assert inner_product(g.sample(f), apply(op, f, g)) >= -1e-10


def test_first_order_and_schrodinger_builders_match_model():
    q, k = P.q, P.k
    eta = first_order_operator(lambda x, y: np.cosh(q * x) * np.sin(q * y),
                               lambda x, y: -np.sinh(q * x) * np.cos(q * y),
                               lambda x, y: np.sin(q * y) * (q * np.sinh(q * x) - q * k / np.sinh(q * x)))
    ref = build_operator("eta", P)
    x, y = np.array([0.3, 1.1]), np.array([0.2, -0.5])
    for key, v in ref.coefficients(x, y).items():
        assert np.allclose(eta.coefficients(x, y)[key], v)
    H = schrodinger_operator(lambda x, y: 1 / np.cosh(q * x) ** 2, build_operator("H", P).c_0)
    for key, v in build_operator("H", P).coefficients(x, y).items():
        assert np.allclose(H.coefficients(x, y)[key], v)


def test_fd_apply_converges_to_exact():
    p = ModelParams()
    f = psi_state(p, 1, 1)
    H = build_operator("H", p)
    errs = []
    for n in (80, 160):
        g = Grid2D.uniform_grid(p, n, n, 4.0)
        exact = apply(H, f, g).values
        fd = apply(H, g.sample(f)).values
        inner = (slice(5, -5), slice(5, -5))
        errs.append(np.max(np.abs(fd - exact)[inner]))
    assert errs[0] / errs[1] > 10


def test_fd_apply_rejects_nonuniform():
    p = ModelParams()
    g = Grid2D.gauss_legendre(p, 3.0)
    with pytest.raises(ValueError):
        apply(build_operator("H", p), GridFunction(g, np.ones(g.shape)))
    with pytest.raises(TypeError):
        apply(build_operator("H", p), 3.0)


def test_one_dim_operators_and_combination():
    A = operator_1d("A", 1.0, 1.5, 2)
    assert A.order == 1 and operator_1d("H_l", 1.0, 1.5, 2).order == 2
    with pytest.raises(ValueError):
        operator_1d("B", 1.0, 1.0, 0)
    f = psi_state(ModelParams(), 0, 0)
    comb = linear_combination([2.0, -1.0], [f, f])
    x, y = np.array([0.5]), np.array([0.1])
    assert np.allclose(comb.values(x, y), f.values(x, y))
    shifted = build_operator("H", ModelParams()).shifted(2.0)
    assert np.allclose(apply(shifted, f).values(x, y), 8.0 * f.values(x, y))
