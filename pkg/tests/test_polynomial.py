import numpy as np
import pytest

from jdisc.polynomial import PolynomialMap


def test_constant_and_coord_evaluation():
    n = 2
    p = PolynomialMap.constant(3 - 1j, n)
    assert p(0.5, np.array([1.0, 2.0])) == 3 - 1j
    z1 = PolynomialMap.coord(0, n)
    assert z1(0.0, np.array([2 + 1j, 0.0])) == 2 + 1j
    zb2 = PolynomialMap.coord_conj(1, n)
    assert zb2(0.0, np.array([0.0, 2 + 1j])) == 2 - 1j


def test_algebra_merges_duplicate_terms():
    n = 1
    z = PolynomialMap.coord(0, n)
    p = z + z - 2 * z
    assert p.is_zero()
    q = (z + 1) * (z - 1)
    assert q(0.0, np.array([3.0])) == pytest.approx(8.0)


def test_zeta_variables():
    n = 1
    p = PolynomialMap.zeta(n) * PolynomialMap.zeta_conj(n)
    assert p(0.5 + 0.5j, np.array([0.0])) == pytest.approx(0.5)


def test_exact_derivative_matches_finite_difference():
    rng = np.random.default_rng(0)
    n = 2
    p = PolynomialMap(n)
    for _ in range(6):
        key = ((rng.integers(0, 3), rng.integers(0, 3)),
               tuple(rng.integers(0, 3, n)), tuple(rng.integers(0, 3, n)))
        p = p + PolynomialMap(n, {key: rng.standard_normal() + 1j * rng.standard_normal()})
    zeta = 0.3 - 0.2j
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    h = 1e-6
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        dx = (p(zeta, z + h * e) - p(zeta, z - h * e)) / (2 * h)
        dy = (p(zeta, z + 1j * h * e) - p(zeta, z - 1j * h * e)) / (2 * h)
        fd_z = (dx - 1j * dy) / 2
        fd_zb = (dx + 1j * dy) / 2
        assert abs(p.d_z(j)(zeta, z) - fd_z) < 1e-7
        assert abs(p.d_z_conj(j)(zeta, z) - fd_zb) < 1e-7
    dxz = (p(zeta + h, z) - p(zeta - h, z)) / (2 * h)
    dyz = (p(zeta + 1j * h, z) - p(zeta - 1j * h, z)) / (2 * h)
    assert abs(p.d_zeta()(zeta, z) - (dxz - 1j * dyz) / 2) < 1e-7
    assert abs(p.d_zeta_conj()(zeta, z) - (dxz + 1j * dyz) / 2) < 1e-7


def test_conjugate():
    n = 1
    p = PolynomialMap.monomial(n, 2j, pzeta=(1, 0), pz=(2,))
    pc = p.conj()
    zeta = 0.4 + 0.1j
    z = np.array([0.7 - 0.3j])
    assert pc(zeta, z) == pytest.approx(np.conj(p(zeta, z)))


def test_vectorized_evaluation():
    n = 1
    p = PolynomialMap.coord(0, n) * PolynomialMap.zeta(n) + 1.5
    zeta = np.array([0.1, 0.2 + 0.3j])
    z = np.array([[1.0], [2.0]])
    vals = p(zeta, z)
    assert vals.shape == (2,)
    assert vals[1] == pytest.approx((0.2 + 0.3j) * 2.0 + 1.5)


def test_degree():
    n = 2
    p = PolynomialMap.monomial(n, 1.0, pzeta=(2, 1), pz=(1, 0), pzb=(0, 3))
    assert p.degree() == 7
