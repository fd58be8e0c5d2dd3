import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdm2d.errors import DomainError
from pdm2d.fields import derivs_from_jet
from pdm2d.grid import Grid2D, gram_matrix
from pdm2d.model import (ModelParams, QuantumNumbers, SusyLabels, Psi_state, degeneracy, energy_level, eval_chi,
                         eval_phi, eval_psi, eval_zero_mode, level_states, psi_state, pt_map,
                         zero_mode_combination, zero_mode_state)
from pdm2d.oracle import pt_exact


def test_spectrum_examples():
    p = ModelParams(1, 1, 0)
    assert [energy_level(p, N) for N in range(3)] == [6.0, 12.0, 20.0]
    assert [degeneracy(N) for N in range(5)] == [1, 1, 2, 2, 3]
    assert energy_level(ModelParams(2, 1.5, -3), 0) == pytest.approx(4 * (2 * 4 - 3))


@given(st.floats(0.1, 5), st.floats(0.05, 6), st.floats(-10, 10), st.integers(0, 20))
def test_energy_increasing_and_scaling(q, k, v0, N):
    p = ModelParams(q, k, v0)
    assert energy_level(p, N + 1) > energy_level(p, N)
    assert energy_level(p, N) == pytest.approx(q * q * energy_level(ModelParams(1, k, v0), N), rel=1e-12)


def test_param_validation():
    for bad in [dict(q=0), dict(q=-1), dict(k=0), dict(k=-0.5), dict(v0=math.inf), dict(q=math.nan)]:
        with pytest.raises(DomainError):
            ModelParams(**bad)
    with pytest.raises(DomainError):
        QuantumNumbers(-1, 0)
    with pytest.raises(DomainError):
        SusyLabels(3, 1)
    with pytest.raises(DomainError):
        energy_level(ModelParams(), -1)
    with pytest.raises(DomainError):
        eval_chi(ModelParams(), 0, [2.0])
    with pytest.raises(DomainError):
        eval_phi(ModelParams(), 0, 0, [-1.0])
    with pytest.raises(DomainError):
        zero_mode_state(ModelParams(), 0)


def test_level_states():
    assert level_states(4) == [(0, 4), (1, 2), (2, 0)]
    assert SusyLabels(5, 2).nu == 3 and QuantumNumbers(2, 1).N == 5


@pytest.mark.parametrize("k", [0.7, 1.0, 2.5])
@pytest.mark.parametrize("nl", [(0, 0), (1, 2), (3, 1), (2, 3)])
def test_hand_derivatives_match_jets(k, nl):
    p = ModelParams(1.3, k, 0.4)
    x = np.linspace(0.05, 4.0, 13)[:, None]
    y = np.linspace(-1.1, 1.1, 7)[None, :]
    st_ = psi_state(p, *nl)
    hand = st_(x, y)
    jet = derivs_from_jet(st_.jet(x, y, 2))
    for a, b in zip(hand, jet):
        assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("s", [1, 2, 3, 5])
def test_zero_mode_derivatives_match_jets(s):
    p = ModelParams(1.0, 1.5, 0.0)
    x = np.linspace(0.1, 3.0, 9)[:, None]
    y = np.linspace(-1.2, 1.2, 5)[None, :]
    st_ = zero_mode_state(p, s)
    for a, b in zip(st_(x, y), derivs_from_jet(st_.jet(x, y, 2))):
        assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


def test_eval_functions_shapes():
    p = ModelParams()
    d = eval_psi(p, QuantumNumbers(1, 1), np.array([0.5, 1.0]), np.array([0.1, 0.2]))
    assert d.value.shape == (2,)
    v, d1, d2 = eval_chi(p, 2, np.array([0.0]))
    assert d2[0] == pytest.approx(-9 * v[0])
    assert eval_zero_mode(p, 1, 1.0, 0.0).value == pytest.approx(np.tanh(1) / np.cosh(1) ** 2)


def test_chi_orthonormal():
    p = ModelParams(1.7)
    y, w = np.polynomial.legendre.leggauss(80)
    y, w = y * p.half_width, w * p.half_width
    G = np.array([[np.sum(w * eval_chi(p, a, y)[0] * eval_chi(p, b, y)[0]) for b in range(6)] for a in range(6)])
    assert np.allclose(G, np.eye(6), atol=1e-13)


@pytest.mark.parametrize("k", [0.7, 2.5])
def test_gram_both_bases(k):
    p = ModelParams(1.0, k, 0.0)
    grid = Grid2D.gauss_legendre(p, 14.0, panels_x=28, panels_y=6, order=10, grading=14)
    sep = [psi_state(p, n, l) for N in range(5) for n, l in level_states(N)]
    sus = [Psi_state(p, N, N0) for N in range(5) for N0 in range(0, N + 1, 2)]
    assert np.allclose(gram_matrix(sep, grid), np.eye(len(sep)), atol=1e-9)
    assert np.allclose(gram_matrix(sus, grid), np.eye(len(sus)), atol=1e-9)


def test_zero_mode_combination_has_unit_top_coefficient():
    p = ModelParams()
    x, y = np.array([0.7]), np.array([0.3])
    comb = zero_mode_combination(p, 0).values(x, y)
    assert np.allclose(comb, zero_mode_state(p, 1).values(x, y))


def test_pt_map_consistent_with_spectrum():
    p = ModelParams(1.5, 1.2, 0.7)
    for n in range(3):
        for l in range(3):
            m = pt_map(p, n, l)
            assert m.pt_energy == pytest.approx(pt_exact(p.k, l, n), rel=1e-13)
            assert m.kappa == p.k and m.lam == l + 1.5
    z = pt_map(p, 0, 0).z_of_x(np.array([0.0, 50.0]))
    assert z[0] == pytest.approx(0.0) and z[1] == pytest.approx(math.pi / 2)
