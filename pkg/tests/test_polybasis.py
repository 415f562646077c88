import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stwave.exceptions import InvalidParameterError
from stwave.polybasis import (
    LagrangeBasis,
    gauss_legendre,
    gauss_lobatto_nodes,
    lagrange_deriv,
    lagrange_eval,
    legendre_table,
    shifted_legendre,
)


def test_one_point_rule_is_midpoint():
    q = gauss_legendre(1)
    np.testing.assert_allclose(q.points, [0.5], atol=1e-16)
    np.testing.assert_allclose(q.weights, [1.0], atol=1e-16)


def test_two_point_rule():
    q = gauss_legendre(2)
    s = 1 / math.sqrt(3)
    np.testing.assert_allclose(q.points, [(1 - s) / 2, (1 + s) / 2], atol=1e-15)
    np.testing.assert_allclose(q.weights, [0.5, 0.5], atol=1e-15)
    for m in range(4):
        assert q.integrate(lambda x: x**m) == pytest.approx(1 / (m + 1), abs=1e-15)


def test_three_point_rule_quartic():
    assert gauss_legendre(3).integrate(lambda x: x**4) == pytest.approx(0.2, abs=1e-14)


@pytest.mark.parametrize("n", range(1, 21))
def test_gauss_exactness(n):
    q = gauss_legendre(n)
    assert math.fsum(q.weights) == pytest.approx(1.0, abs=1e-14)
    assert np.all(q.weights > 0) and np.all((q.points > 0) & (q.points < 1))
    for m in range(2 * n):
        exact = 1 / (m + 1)
        assert abs(q.integrate(lambda x: x**m) - exact) <= 1e-13 * exact


@pytest.mark.parametrize("n", [1, 5, 17, 40, 64])
def test_gauss_matches_numpy(n):
    # numpy's eigenvalue-based rule serves as the independent oracle
    x, w = np.polynomial.legendre.leggauss(n)
    q = gauss_legendre(n)
    np.testing.assert_allclose(q.points, (x + 1) / 2, atol=1e-14)
    np.testing.assert_allclose(q.weights, w / 2, atol=1e-14)


@pytest.mark.parametrize("n", [0, 65, 2.5])
def test_gauss_out_of_range(n):
    with pytest.raises(InvalidParameterError):
        gauss_legendre(n)


def test_shifted_legendre_low_degrees():
    xi = np.linspace(0, 1, 7)
    np.testing.assert_allclose(shifted_legendre(0, xi), 1.0)
    np.testing.assert_allclose(shifted_legendre(1, xi), 2 * xi - 1)
    for k in range(15):
        assert shifted_legendre(k, 1.0) == pytest.approx(1.0, abs=1e-14)


def test_shifted_legendre_orthogonality():
    q = gauss_legendre(4)
    assert q.integrate(lambda x: shifted_legendre(1, x) * shifted_legendre(2, x)) == pytest.approx(0, abs=1e-16)
    q = gauss_legendre(14)
    L = legendre_table(12, q.points)
    G = (L.T * q.weights) @ L
    np.testing.assert_allclose(G, np.diag(1 / (2 * np.arange(13) + 1)), atol=1e-13)


def test_lobatto_nodes():
    np.testing.assert_allclose(gauss_lobatto_nodes(1), [0, 1])
    np.testing.assert_allclose(gauss_lobatto_nodes(2), [0, 0.5, 1])
    s = 1 / math.sqrt(5)
    np.testing.assert_allclose(gauss_lobatto_nodes(3), [0, (1 - s) / 2, (1 + s) / 2, 1], atol=1e-15)


def test_linear_hats():
    b = LagrangeBasis(1)
    assert lagrange_eval(b, 0, 0.3) == pytest.approx(0.7)
    assert lagrange_eval(b, 1, 0.3) == pytest.approx(0.3)
    assert lagrange_deriv(b, 0, 0.3) == pytest.approx(-1)
    assert lagrange_deriv(b, 1, 0.9) == pytest.approx(1)


@pytest.mark.parametrize("placement", ["gauss_lobatto", "equispaced"])
@pytest.mark.parametrize("p", range(1, 9))
def test_nodal_property_and_partition_of_unity(p, placement):
    b = LagrangeBasis(p, placement)
    assert b.ref_nodes[0] == 0.0 and b.ref_nodes[-1] == 1.0
    np.testing.assert_allclose(b.values(b.ref_nodes), np.eye(p + 1), atol=1e-13)
    xi = np.random.default_rng(p).uniform(0, 1, 50)
    np.testing.assert_allclose(b.values(xi).sum(axis=1), 1.0, atol=1e-13)
    np.testing.assert_allclose(b.derivatives(xi).sum(axis=1), 0.0, atol=1e-10)


@pytest.mark.parametrize("p", [2, 4, 7])
def test_derivatives_match_finite_differences(p):
    b = LagrangeBasis(p)
    xi = np.linspace(0.05, 0.95, 11)
    h = 1e-6
    fd = (b.values(xi + h) - b.values(xi - h)) / (2 * h)
    np.testing.assert_allclose(b.derivatives(xi), fd, atol=1e-6 * p**2)


@settings(max_examples=30, deadline=None)
@given(p=st.integers(1, 8), coeffs=st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_basis_reproduces_polynomials(p, coeffs):
    # interpolating a degree-p polynomial at the nodes reproduces it
    poly = np.polynomial.Polynomial(coeffs[: p + 1])
    b = LagrangeBasis(p)
    xi = np.linspace(0, 1, 13)
    np.testing.assert_allclose(b.values(xi) @ poly(b.ref_nodes), poly(xi), atol=1e-10)
    np.testing.assert_allclose(b.derivatives(xi) @ poly(b.ref_nodes), poly.deriv()(xi), atol=1e-8)


def test_invalid_basis():
    with pytest.raises(InvalidParameterError):
        LagrangeBasis(0)
    with pytest.raises(InvalidParameterError):
        LagrangeBasis(2, "chebyshev")
