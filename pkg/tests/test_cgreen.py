import numpy as np
import pytest

from jdisc.cgreen import (
    DiscGrid,
    HolomorphicDatum,
    SpectralField,
    analyze,
    cauchy_green,
    cg_quadrature_oracle,
    complex_derivative,
    grid_for_degree,
    grid_inner_product,
    holomorphy_defect,
    inner_product,
    s_chi,
    synthesize,
)
from jdisc.errors import DegreeOverflow, JDiscError, UnderResolved

GRID = DiscGrid(24, 48)


def random_field(rng, ncomp, degree, capacity=None):
    capacity = capacity or degree
    c = np.zeros((ncomp, capacity + 1, capacity + 1), complex)
    for m in range(degree + 1):
        for l in range(degree + 1 - m):
            c[:, m, l] = rng.standard_normal(ncomp) + 1j * rng.standard_normal(ncomp)
    return SpectralField(c)


# ---- grid ---------------------------------------------------------------------

def test_no_nodes_at_zero_or_one():
    assert GRID.r.min() > 0 and GRID.r.max() < 1


def test_quadrature_exact_on_monomials():
    # integral of zeta^m zetab^l is 2 pi/(m+l+2) iff m == l, else 0
    for m in range(0, 13):
        for l in range(0, 13 - m):
            vals = GRID.points**m * np.conj(GRID.points) ** l
            got = GRID.integrate(vals)
            want = 2 * np.pi / (m + l + 2) if m == l else 0.0
            assert abs(got - want) < 1e-12


def test_grid_gram_matches_exact_gram():
    rng = np.random.default_rng(0)
    for _ in range(5):
        u = random_field(rng, 1, 8)
        v = random_field(rng, 1, 8)
        exact = inner_product(u, v)
        quad = grid_inner_product(GRID, u.values(GRID), v.values(GRID))
        assert abs(exact - quad) < 1e-10 * (1 + abs(exact))


# ---- analyze / synthesize -------------------------------------------------------

def test_analyze_constant():
    f = analyze(GRID, np.ones(GRID.size), degree=16)
    assert f.coefficient(0, 0)[0] == pytest.approx(1.0)
    c = f.coeffs.copy()
    c[0, 0, 0] = 0
    # stray coefficients are round-off through the monomial conversion
    assert np.abs(c).max() < 1e-9
    assert np.abs(f.values(GRID)[:, 0] - 1.0).max() < 1e-12


def test_analyze_single_monomial():
    vals = GRID.points**2 * np.conj(GRID.points)
    f = analyze(GRID, vals, degree=16)
    assert f.coefficient(2, 1)[0] == pytest.approx(1.0)
    c = f.coeffs.copy()
    c[0, 2, 1] = 0
    assert np.abs(c).max() < 1e-10


def test_round_trip_reproduces_polynomial_values():
    rng = np.random.default_rng(1)
    u = random_field(rng, 2, 16)
    vals = u.values(GRID)
    u2 = analyze(GRID, vals, degree=16)
    assert np.abs(u2.values(GRID) - vals).max() < 1e-10
    # resynthesis is idempotent
    u3 = analyze(GRID, u2.values(GRID), degree=16)
    assert np.abs(u3.values(GRID) - u2.values(GRID)).max() < 1e-12


def test_analyze_exponential_tail():
    # exp(zeta)/2 at N=16: truncation tail is far below 1e-12
    vals = np.exp(GRID.points) / 2
    f = analyze(GRID, vals, degree=16)
    assert np.abs(f.values(GRID)[:, 0] - vals).max() < 1e-12


def test_underresolved_raises():
    with pytest.raises(UnderResolved):
        analyze(DiscGrid(6, 12), np.ones(72), degree=10)


def test_grid_for_degree_budget():
    g = grid_for_degree(16)
    assert g.n_r == 24 and g.n_theta == 48
    assert g.max_analyze_degree() >= 16


# ---- cauchy_green ---------------------------------------------------------------

def test_t_of_one_is_zetabar():
    u = SpectralField.constant([1.0])
    Tu = cauchy_green(u)
    assert Tu.coefficient(0, 1)[0] == pytest.approx(1.0)
    assert Tu.degree() == 1
    # oracle cross-check at a sample point
    got = cg_quadrature_oracle(lambda w: np.ones_like(w), 0.3)
    assert abs(got - 0.3) < 1e-12


def test_t_of_zeta_squared():
    u = SpectralField.monomial(1, 0, 2, 0)
    Tu = cauchy_green(u)
    assert Tu.coefficient(2, 1)[0] == pytest.approx(1.0)
    assert Tu.coefficient(1, 0)[0] == pytest.approx(-1.0)
    assert complex_derivative(Tu, "dzetabar").coeffs == pytest.approx(u.with_capacity(Tu.capacity).coeffs)
    pt = 0.41 - 0.27j
    got = cg_quadrature_oracle(lambda w: w**2, pt)
    want = pt**2 * np.conj(pt) - pt
    assert abs(got - want) < 1e-12


def test_t_of_omega_closed_form():
    pt = 0.5
    got = cg_quadrature_oracle(lambda w: w, pt)
    assert abs(got - (pt * np.conj(pt) - 1)) < 1e-12  # = -0.75


def test_centered_variant_vanishes_at_zero():
    u = SpectralField.monomial(1, 0, 0, 1)  # zetabar
    T0u = cauchy_green(u, centered=True)
    assert T0u.coefficient(0, 2)[0] == pytest.approx(0.5)
    assert np.abs(T0u.eval(np.array(0j))).max() == 0.0
    rng = np.random.default_rng(2)
    v = random_field(rng, 2, 10)
    T0v = cauchy_green(v, centered=True)
    assert np.abs(T0v.eval(np.array(0j))).max() == 0.0


def test_dzetabar_after_t_is_identity():
    rng = np.random.default_rng(3)
    for _ in range(5):
        u = random_field(rng, 2, 12)
        Tu = cauchy_green(u)
        err = (complex_derivative(Tu, "dzetabar") - u.with_capacity(Tu.capacity)).coeffs
        assert np.abs(err).max() < 1e-13


def test_t_raises_on_budget():
    u = SpectralField.monomial(1, 0, 5, 5)
    with pytest.raises(DegreeOverflow):
        cauchy_green(u, max_degree=10)


def test_oracle_matches_coefficient_action_on_monomials():
    rng = np.random.default_rng(4)
    pts = []
    while len(pts) < 10:
        z = rng.uniform(-0.95, 0.95) + 1j * rng.uniform(-0.95, 0.95)
        if abs(z) < 0.95:
            pts.append(z)
    for m, l in [(0, 0), (3, 0), (0, 3), (2, 2), (5, 3), (1, 6)]:
        u = SpectralField.monomial(1, 0, m, l)
        Tu = cauchy_green(u)
        for z in pts:
            got = cg_quadrature_oracle(lambda w, m=m, l=l: w**m * np.conj(w) ** l, z)
            want = Tu.eval(np.array(z))[0]
            assert abs(got - want) < 1e-6


# ---- derivatives -----------------------------------------------------------------

def test_complex_derivative_examples():
    u = SpectralField.monomial(1, 0, 1, 1)  # zeta zetabar
    d = complex_derivative(u, "dzetabar")
    assert d.coefficient(1, 0)[0] == pytest.approx(1.0)
    u2 = SpectralField.monomial(1, 0, 2, 1)
    d2 = complex_derivative(u2, "dzeta")
    assert d2.coefficient(1, 1)[0] == pytest.approx(2.0)
    with pytest.raises(JDiscError):
        complex_derivative(u, "bogus")


# ---- inner products ----------------------------------------------------------------

def test_inner_product_examples():
    one = SpectralField.constant([1.0])
    zeta = SpectralField.monomial(1, 0, 1, 0)
    zetab = SpectralField.monomial(1, 0, 0, 1)
    assert inner_product(one, one) == pytest.approx(np.pi)
    assert inner_product(zeta, zeta) == pytest.approx(np.pi / 2)
    assert inner_product(zeta, zetab) == pytest.approx(0.0)


def test_adjoint_identity_t():
    # Re(Tu, v) = Re(u, -conj(T(conj v))) on real-coefficient test pairs
    rng = np.random.default_rng(5)
    for _ in range(10):
        u = SpectralField(rng.standard_normal((1, 9, 9)) * (np.add.outer(np.arange(9), np.arange(9)) <= 8))
        v = SpectralField(rng.standard_normal((1, 9, 9)) * (np.add.outer(np.arange(9), np.arange(9)) <= 8))
        lhs = inner_product(cauchy_green(u), v).real
        Tbar_v = cauchy_green(v.conj()).conj()
        rhs = inner_product(u, -1.0 * Tbar_v).real
        assert abs(lhs - rhs) < 1e-10 * (1 + u.norm_l2() * v.norm_l2())


def test_conjugation_self_adjoint():
    rng = np.random.default_rng(6)
    u = random_field(rng, 2, 8)
    v = random_field(rng, 2, 8)
    assert abs(inner_product(u.conj(), v).real - inner_product(u, v.conj()).real) < 1e-12


def test_s_chi_functional():
    # S_1 u = -(1/pi) int u dA; for u = 1 this is -1
    one = SpectralField.constant([1.0])
    assert s_chi(one, one) == pytest.approx(-1.0)
    # T u(0) = S_{1/zeta} u: check via monomial zeta (T(zeta)(0) = -1)
    zeta = SpectralField.monomial(1, 0, 1, 0)
    Tz = cauchy_green(zeta)
    assert Tz.eval(np.array(0j))[0] == pytest.approx(-1.0)


# ---- holomorphic data ----------------------------------------------------------------

def test_holomorphic_datum_roundtrip():
    phi = HolomorphicDatum(np.array([[1.0, 2.0, 0.5]]))
    f = phi.to_field(capacity=6)
    assert holomorphy_defect(f) == 0.0
    phi2 = HolomorphicDatum.from_field(f)
    assert np.allclose(phi2.taylor[:, :3], phi.taylor)


def test_holomorphic_datum_vanishing_flag():
    with pytest.raises(JDiscError):
        HolomorphicDatum(np.array([[1.0, 2.0]]), vanishes_at_zero=True)
    d = HolomorphicDatum(np.array([[0.0, 2.0]]), vanishes_at_zero=True)
    assert d.value_at_zero()[0] == 0.0


def test_from_field_rejects_antiholomorphic():
    f = SpectralField.monomial(1, 0, 0, 2)
    with pytest.raises(JDiscError):
        HolomorphicDatum.from_field(f)


# ---- field algebra --------------------------------------------------------------------

def test_field_multiply_exact():
    rng = np.random.default_rng(7)
    a = random_field(rng, 1, 4)
    b = random_field(rng, 1, 5)
    prod = a.multiply(b)
    pts = 0.3 * (rng.standard_normal(7) + 1j * rng.standard_normal(7))
    want = a.eval(pts)[:, 0] * b.eval(pts)[:, 0]
    assert np.abs(prod.eval(pts)[:, 0] - want).max() < 1e-12


def test_shift_zeta():
    u = SpectralField.monomial(1, 0, 1, 1)
    s = u.shift_zeta(2)
    assert s.coefficient(3, 1)[0] == pytest.approx(1.0)


def test_truncated_drops_high_bidegree():
    rng = np.random.default_rng(8)
    u = random_field(rng, 1, 10)
    t = u.truncated(4)
    assert t.degree() <= 4
