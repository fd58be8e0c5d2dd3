import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdm2d import coeffs
from pdm2d.errors import DomainError
from pdm2d.suites import lattice_path_count

KS = (0.7, 1.0, 2.5)


@pytest.mark.parametrize("l", range(11))
def test_x_factor_equals_lattice_paths(l):
    for nu in range(11):
        for mu in range(nu + 1):
            assert coeffs.x_factor(l, nu, mu) == lattice_path_count(l, nu, mu)


def test_x_factor_starting_values_and_vanishing():
    for l in range(6):
        assert coeffs.x_factor(l, 1, 0) == 1
        assert coeffs.x_factor(l, 1, 1) == (0 if l == 0 else 1)
    for l in range(6):
        for nu in range(8):
            for mu in range(nu + 1):
                if mu > math.ceil((l + nu) / 2):
                    assert coeffs.x_factor(l, nu, mu) == 0


def test_closed_forms_on_their_domains():
    for l in range(12):
        for nu in range(l + 1):
            for mu in range(nu + 1):
                assert coeffs.x_factor_binomial(l, nu, mu) == coeffs.x_factor(l, nu, mu)
    for nu in range(14):
        for mu in range(nu + 1):
            assert coeffs.x_factor_ground(nu, mu) == coeffs.x_factor(0, nu, mu)
    with pytest.raises(DomainError):
        coeffs.x_factor_binomial(1, 3, 0)


@given(st.integers(0, 8), st.integers(1, 9))
def test_x_factor_total_paths_bounded_by_two_to_nu(l, nu):
    total = sum(coeffs.x_factor(l, nu, mu) for mu in range(nu + 1))
    assert total <= 2**nu
    if l >= nu:
        assert total == 2**nu


def test_phase_exponent_is_integral():
    for nu in range(11):
        for N in range(nu, nu + 12):
            for mu in range(nu + 1):
                e = coeffs.phase_exponent(nu, N, mu)
                assert isinstance(e, Fraction) and e.denominator == 1


def test_Y_phase_integral_over_used_labels():
    for nu in range(11):
        for n in range(3):
            for l in range(5):
                for mu in range(nu + 1):
                    if coeffs.x_factor(l, nu, mu):
                        coeffs.Y_coeff(1.0, n, l, nu, mu)  # raises on a half-integer exponent


@pytest.mark.parametrize("k", KS)
def test_S_sum_routes(k):
    for N0 in range(0, 21, 2):
        c = coeffs.S_sum(k, N0)
        assert coeffs.S_sum(k, N0, "direct") == pytest.approx(c, rel=1e-12)
        assert coeffs.S_sum(k, N0, "full") == pytest.approx(c, rel=1e-12)


@pytest.mark.parametrize("k", KS)
def test_X_routes_and_normalization(k):
    for N0 in range(0, 13, 2):
        X = coeffs.X_vector(k, N0)
        assert np.all(X > 0)
        assert float(X @ X) == pytest.approx(1.0, abs=1e-13)
        for n in range(N0 // 2 + 1):
            assert coeffs.X_coeff_recursive(k, N0, n) == pytest.approx(X[n], rel=1e-12)


def test_a_coeffs_small_case():
    k = 1.3
    a = coeffs.a_coeffs(k, 2)
    assert a[3] == pytest.approx(1.0, rel=1e-14)
    assert a[1] == pytest.approx(-1.5 / (k + 2.5), rel=1e-14)


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("N", range(9))
def test_transform_orthogonal(k, N):
    T = coeffs.transform_matrix(k, N)
    assert T.entries.shape == (N // 2 + 1, N // 2 + 1)
    assert T.orthogonality_residual() < 1e-10


@pytest.mark.parametrize("k", KS)
def test_chain_route_sign_relation(k):
    """The literal raising chain differs from the closed N0 = 0 rows by (-1)^N."""
    for N in range(9):
        assert np.allclose(coeffs.Z_row_chain(k, N, 0), (-1) ** N * coeffs.Z_row_closed(k, N), atol=1e-13)
        assert np.allclose(coeffs.Z_row(k, N, 0), coeffs.Z_row_closed(k, N), atol=1e-13)


def test_nu_zero_rows_are_X():
    for N0 in range(0, 9, 2):
        assert np.allclose(coeffs.Z_row(1.0, N0, N0), coeffs.X_vector(1.0, N0), atol=1e-15)


def test_ladder_coefficients_structure():
    assert coeffs.ladder_coeffs(2.0, 0, 0, "down") == (0.0, 0.0)
    assert coeffs.ladder_targets(2, 1, "down") == ((1, 2), (2, 0))
    assert coeffs.ladder_targets(2, 1, "up") == ((3, 0), (2, 2))
    c1, _ = coeffs.ladder_coeffs(1.0, 3, 0, "up")
    assert c1 == 0.0
    with pytest.raises(ValueError):
        coeffs.ladder_coeffs(1.0, 0, 0, "sideways")


def test_transform_json_roundtrip():
    import json
    d = json.loads(coeffs.transform_matrix(1.0, 4).to_json())
    assert d["N"] == 4 and len(d["entries"]) == 3 and d["orthogonality_residual"] < 1e-12
    assert d["columns"][0] == {"n": 0, "l": 4}


def test_invalid_labels():
    for N, N0 in [(3, 1), (2, 4), (2, -2)]:
        with pytest.raises(DomainError):
            coeffs.Z_row(1.0, N, N0)
