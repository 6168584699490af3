"""Spectral fields on the closed unit disc and the Cauchy-Green operator.

Functions are represented by monomial coefficients c_{m,l} for zeta^m
conj(zeta)^l with m + l <= degree, together with values on a polar
Gauss-Legendre x uniform-angle grid.  The Cauchy-Green operator

    T u(zeta) = (1/2 pi i) int_D u(w) dw ^ dconj(w) / (w - zeta)

acts exactly on monomials:

    T(zeta^m zetab^l) = (zeta^m zetab^(l+1) - [m >= l+1] zeta^(m-l-1)) / (l+1)

which makes d/dzetab (T u) = u an identity of coefficient arithmetic.  An
independent singular-quadrature oracle cross-checks these closed forms.
"""
from __future__ import annotations

import numpy as np

from .errors import DegreeOverflow, JDiscError, UnderResolved

#: hard cap on coefficient-array capacity, to catch runaway degree growth
MAX_CAPACITY = 256


def grid_for_degree(degree, radial_margin=8, angular_margin=16):
    """A DiscGrid comfortably resolving fields of the given degree."""
    return DiscGrid(degree + radial_margin, 2 * degree + angular_margin)


class DiscGrid:
    """Polar quadrature grid: Gauss-Legendre in r on (0,1), uniform angles.

    Area quadrature sum(weights * f) integrates zeta^m zetab^l exactly for
    m + l <= max_exact_degree.  No node sits at r = 0 or r = 1.
    """

    def __init__(self, n_r, n_theta):
        if n_r < 2 or n_theta < 4:
            raise JDiscError("grid too small")
        self.n_r = int(n_r)
        self.n_theta = int(n_theta)
        x, w = np.polynomial.legendre.leggauss(self.n_r)
        self.r = 0.5 * (x + 1.0)
        self.w_r = 0.5 * w
        self.theta = 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta
        zz = self.r[:, None] * np.exp(1j * self.theta)[None, :]
        self.points = zz.ravel()
        self.weights = ((self.w_r * self.r)[:, None] * (2 * np.pi / self.n_theta)
                        * np.ones(self.n_theta)[None, :]).ravel()
        self._power_cache = {}

    @property
    def size(self):
        return self.n_r * self.n_theta

    @property
    def max_exact_degree(self):
        # radial rule exact for r-degree 2 n_r - 1 (area weight adds one power);
        # angular aliasing-free for |mode| < n_theta
        return min(2 * self.n_r - 2, self.n_theta - 1)

    def max_analyze_degree(self):
        """Largest degree the analysis transform supports on this grid."""
        return min(self.n_r - 1, (self.n_theta - 2) // 2)

    def integrate(self, values):
        """Area integral of pointwise values (flat array over grid points)."""
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, 0))

    def zeta_powers(self, max_power):
        """Cached arrays zeta^m and conj(zeta)^l, shapes (max_power+1, size)."""
        if max_power not in self._power_cache:
            zp = np.ones((max_power + 1, self.size), complex)
            for m in range(1, max_power + 1):
                zp[m] = zp[m - 1] * self.points
            self._power_cache[max_power] = (zp, np.conj(zp))
        return self._power_cache[max_power]

    def __repr__(self):
        return f"DiscGrid(n_r={self.n_r}, n_theta={self.n_theta})"


class SpectralField:
    """A C^m-valued function on the closed disc stored as monomial coefficients.

    ``coeffs`` has shape (n_components, capacity+1, capacity+1); the entry
    ``coeffs[c, m, l]`` multiplies zeta^m conj(zeta)^l.  Fields are treated
    as immutable; grid values are cached per grid.
    """

    __slots__ = ("coeffs", "_values_cache")

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim == 2:
            coeffs = coeffs[None]
        if coeffs.ndim != 3 or coeffs.shape[1] != coeffs.shape[2]:
            raise JDiscError("coeffs must have shape (ncomp, D+1, D+1)")
        if coeffs.shape[1] > MAX_CAPACITY + 1:
            raise DegreeOverflow(f"capacity {coeffs.shape[1]-1} exceeds {MAX_CAPACITY}")
        self.coeffs = coeffs
        self._values_cache = {}

    # ---- constructors ------------------------------------------------------
    @classmethod
    def zeros(cls, ncomp, capacity):
        return cls(np.zeros((ncomp, capacity + 1, capacity + 1), complex))

    @classmethod
    def monomial(cls, ncomp, comp, m, l, coeff=1.0, capacity=None):
        capacity = max(m + l, capacity or 0)
        f = np.zeros((ncomp, capacity + 1, capacity + 1), complex)
        f[comp, m, l] = coeff
        return cls(f)

    @classmethod
    def constant(cls, values, capacity=0):
        values = np.atleast_1d(np.asarray(values, dtype=complex))
        f = np.zeros((values.size, capacity + 1, capacity + 1), complex)
        f[:, 0, 0] = values
        return cls(f)

    # ---- basic queries -----------------------------------------------------
    @property
    def ncomp(self):
        return self.coeffs.shape[0]

    @property
    def capacity(self):
        return self.coeffs.shape[1] - 1

    def degree(self):
        nz = np.argwhere(np.abs(self.coeffs).sum(axis=0) != 0)
        if nz.size == 0:
            return 0
        return int((nz[:, 0] + nz[:, 1]).max())

    def coefficient(self, m, l):
        """c_{m,l} as a length-ncomp vector (zero outside capacity)."""
        if m > self.capacity or l > self.capacity:
            return np.zeros(self.ncomp, complex)
        return self.coeffs[:, m, l].copy()

    # ---- algebra -----------------------------------------------------------
    def _aligned(self, other):
        D = max(self.capacity, other.capacity)
        return self.with_capacity(D).coeffs, other.with_capacity(D).coeffs

    def with_capacity(self, capacity):
        if capacity == self.capacity:
            return self
        if capacity > MAX_CAPACITY:
            raise DegreeOverflow(f"capacity {capacity} exceeds {MAX_CAPACITY}")
        D0 = self.capacity
        out = np.zeros((self.ncomp, capacity + 1, capacity + 1), complex)
        c = min(D0, capacity)
        out[:, : c + 1, : c + 1] = self.coeffs[:, : c + 1, : c + 1]
        return SpectralField(out)

    def truncated(self, degree):
        """Drop all coefficients with m + l > degree (plain coefficient drop)."""
        out = self.with_capacity(min(self.capacity, max(degree, 0))).coeffs.copy()
        D = out.shape[1] - 1
        m_idx, l_idx = np.meshgrid(np.arange(D + 1), np.arange(D + 1), indexing="ij")
        out[:, m_idx + l_idx > degree] = 0
        return SpectralField(out)

    def __add__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b = self._aligned(other)
        return SpectralField(a + b)

    def __sub__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b = self._aligned(other)
        return SpectralField(a - b)

    def __mul__(self, scalar):
        return SpectralField(self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(-self.coeffs)

    def multiply(self, other):
        """Exact product with a scalar field (ncomp 1) or componentwise."""
        if other.ncomp not in (1, self.ncomp) and self.ncomp != 1:
            raise JDiscError("component mismatch in field product")
        D = self.degree() + other.degree()
        if D > MAX_CAPACITY:
            raise DegreeOverflow(f"product degree {D} exceeds {MAX_CAPACITY}")
        ncomp = max(self.ncomp, other.ncomp)
        out = np.zeros((ncomp, D + 1, D + 1), complex)
        a = self.coeffs if self.ncomp == ncomp else np.repeat(self.coeffs, ncomp, 0)
        b = other.coeffs if other.ncomp == ncomp else np.repeat(other.coeffs, ncomp, 0)
        for c in range(ncomp):
            nz = np.argwhere(a[c] != 0)
            for m, l in nz:
                Db = other.capacity if other.ncomp == ncomp else other.capacity
                bm = min(b.shape[1], D + 1 - m)
                bl = min(b.shape[2], D + 1 - l)
                out[c, m : m + bm, l : l + bl] += a[c, m, l] * b[c, :bm, :bl]
        return SpectralField(out)

    def conj(self):
        return SpectralField(np.conj(np.swapaxes(self.coeffs, 1, 2)))

    def component(self, c):
        return SpectralField(self.coeffs[c : c + 1])

    @classmethod
    def stack(cls, fields):
        D = max(f.capacity for f in fields)
        return cls(np.concatenate([f.with_capacity(D).coeffs for f in fields], axis=0))

    # ---- calculus ----------------------------------------------------------
    def dzeta(self):
        out = np.zeros_like(self.coeffs)
        D = self.capacity
        out[:, : D, :] = self.coeffs[:, 1:, :] * np.arange(1, D + 1)[None, :, None]
        return SpectralField(out)

    def dzetabar(self):
        out = np.zeros_like(self.coeffs)
        D = self.capacity
        out[:, :, : D] = self.coeffs[:, :, 1:] * np.arange(1, D + 1)[None, None, :]
        return SpectralField(out)

    def shift_zeta(self, k):
        """Multiply by zeta^k exactly (capacity grows by k)."""
        D = self.capacity + k
        if D > MAX_CAPACITY:
            raise DegreeOverflow(f"capacity {D} exceeds {MAX_CAPACITY}")
        out = np.zeros((self.ncomp, D + 1, D + 1), complex)
        out[:, k:, : self.capacity + 1] = self.coeffs
        return SpectralField(out)

    # ---- evaluation --------------------------------------------------------
    def eval(self, points):
        """Values at arbitrary complex points; returns shape points.shape + (ncomp,)."""
        pts = np.asarray(points, dtype=complex)
        flat = pts.ravel()
        D = self.capacity
        zp = np.ones((D + 1, flat.size), complex)
        for m in range(1, D + 1):
            zp[m] = zp[m - 1] * flat
        zbp = np.conj(zp)
        vals = np.einsum("cml,mp,lp->pc", self.coeffs, zp, zbp)
        return vals.reshape(pts.shape + (self.ncomp,))

    def values(self, grid):
        """Values on a DiscGrid, cached: shape (grid.size, ncomp)."""
        key = id(grid)
        hit = self._values_cache.get(key)
        if hit is not None and hit[0] is grid:
            return hit[1]
        zp, zbp = grid.zeta_powers(self.capacity)
        vals = np.einsum("cml,mp,lp->pc", self.coeffs, zp, zbp)
        self._values_cache[key] = (grid, vals)
        return vals

    # ---- norms -------------------------------------------------------------
    def norm_l2(self):
        """Exact L2(disc) norm from the monomial Gram rule."""
        return np.sqrt(max(inner_product(self, self).real, 0.0))

    def norm_grid(self, grid):
        v = self.values(grid)
        return float(np.sqrt(grid.integrate(np.abs(v) ** 2).sum().real))

    def norm_sup(self, grid):
        return float(np.abs(self.values(grid)).max()) if self.ncomp else 0.0

    def __repr__(self):
        return f"SpectralField(ncomp={self.ncomp}, degree={self.degree()})"


class HolomorphicDatum:
    """Taylor coefficients of a holomorphic C^n-valued map on the disc."""

    def __init__(self, taylor, vanishes_at_zero=False):
        taylor = np.atleast_2d(np.asarray(taylor, dtype=complex))
        self.taylor = taylor  # (ncomp, K+1)
        self.vanishes_at_zero = bool(vanishes_at_zero)
        if self.vanishes_at_zero and np.any(taylor[:, 0] != 0):
            raise JDiscError("datum marked as vanishing at zero has phi_0 != 0")

    @property
    def ncomp(self):
        return self.taylor.shape[0]

    @property
    def order(self):
        return self.taylor.shape[1] - 1

    def value_at_zero(self):
        return self.taylor[:, 0].copy()

    def to_field(self, capacity=None):
        capacity = max(self.order, capacity or 0)
        f = np.zeros((self.ncomp, capacity + 1, capacity + 1), complex)
        f[:, : self.order + 1, 0] = self.taylor
        return SpectralField(f)

    @classmethod
    def from_field(cls, field, tol=1e-9):
        """Extract the holomorphic part; reject sizeable antiholomorphic content."""
        defect = holomorphy_defect(field)
        scale = max(1.0, float(np.abs(field.coeffs).max()))
        if defect > tol * scale:
            raise JDiscError(f"field is not holomorphic (defect {defect:.3e})")
        return cls(field.coeffs[:, :, 0].copy())

    def __repr__(self):
        return f"HolomorphicDatum(ncomp={self.ncomp}, order={self.order})"


def holomorphy_defect(field):
    """Largest coefficient with a conj(zeta) power."""
    if field.capacity == 0:
        return 0.0
    return float(np.abs(field.coeffs[:, :, 1:]).max())


# ---- grid transforms -------------------------------------------------------

def analyze(grid, values, degree, ncomp=None):
    """Fit grid values by a spectral field of the given degree.

    Projects onto the degree budget in the grid's quadrature inner product
    (angular modes separate exactly; per mode this is a weighted radial
    least-squares fit on the parity-constrained span, solved through the
    orthonormalized radial basis).  Reproduces polynomial data of bidegree
    <= degree exactly.
    """
    if degree > grid.max_analyze_degree():
        raise UnderResolved(
            f"degree {degree} needs n_theta >= {2*degree+2} and n_r >= {degree+1}, "
            f"got ({grid.n_r}, {grid.n_theta})")
    from .basis import get_basis  # deferred: basis builds on this module

    values = np.asarray(values, dtype=complex)
    if values.ndim == 1:
        values = values[:, None]
    ncomp = ncomp or values.shape[1]
    basis = get_basis(degree)
    _, A = basis.quadrature_maps(grid)
    coords = (A @ values).T.ravel()  # (ncomp * dim,) component-major
    return basis.from_on(coords, ncomp)


def synthesize(field, grid):
    """Values of a field on a grid (same as field.values, spec-level alias)."""
    return field.values(grid)


# ---- the Cauchy-Green operator ----------------------------------------------

def cauchy_green(u, centered=False, max_degree=None):
    """Apply T (or the recentered T_0) in exact coefficient arithmetic.

    Raises DegreeOverflow if the result would exceed ``max_degree`` (when
    given) or the hard capacity cap.
    """
    D_in = u.degree()
    if max_degree is not None and D_in + 1 > max_degree:
        raise DegreeOverflow(f"T needs degree {D_in + 1} > budget {max_degree}")
    D = min(max(D_in + 1, u.capacity), MAX_CAPACITY)
    if D_in + 1 > MAX_CAPACITY:
        raise DegreeOverflow(f"T output degree {D_in+1} exceeds {MAX_CAPACITY}")
    out = np.zeros((u.ncomp, D + 1, D + 1), complex)
    src = u.coeffs
    nz = np.argwhere(np.abs(src).sum(axis=0) != 0)
    for m, l in nz:
        c = src[:, m, l]
        out[:, m, l + 1] += c / (l + 1)
        if m >= l + 1:
            out[:, m - l - 1, 0] -= c / (l + 1)
            if centered and m - l - 1 == 0:
                # T0 u = T u - T u(0); only monomials with m = l + 1 hit zero
                out[:, 0, 0] += c / (l + 1)
    return SpectralField(out)


def complex_derivative(u, which):
    """Exact monomial differentiation: which is 'dzeta' or 'dzetabar'."""
    if which == "dzeta":
        return u.dzeta()
    if which == "dzetabar":
        return u.dzetabar()
    raise JDiscError(f"unknown derivative {which!r}")


# ---- inner products ----------------------------------------------------------

def inner_product(u, v, conjugate_second=True):
    """(u, v) = sum_j int_D u_j conj(v_j) dA, exact on coefficients.

    The monomial rule:  int zeta^m zetab^l conj(zeta^m' zetab^l') dA equals
    2 pi / (m+l+m'+l'+2) when m - l = m' - l' and zero otherwise.  With
    ``conjugate_second=False`` computes sum_j int u_j v_j dA, the bilinear
    pairing behind the moment functionals S_chi.
    """
    if u.ncomp != v.ncomp:
        raise JDiscError("component mismatch in inner product")
    a = u.coeffs
    b = np.conj(np.swapaxes(v.coeffs, 1, 2)) if not conjugate_second else v.coeffs
    # after this, the pairing is always sum int a . conj(b) dA
    Da, Db = a.shape[1] - 1, b.shape[1] - 1
    total = 0j
    for k in range(-min(Da, Db), min(Da, Db) + 1):
        ta = _diag_vectors(a, k)
        tb = _diag_vectors(b, k)
        if ta is None or tb is None:
            continue
        va, tots_a = ta
        vb, tots_b = tb
        G = 2 * np.pi / (tots_a[:, None] + tots_b[None, :] + 2.0)
        total += np.einsum("ci,ij,cj->", va, G, np.conj(vb))
    return complex(total)


def _diag_vectors(coeffs, k):
    """Coefficients along the angular-mode-k diagonal with their total degrees."""
    D = coeffs.shape[1] - 1
    if abs(k) > D:
        return None
    ms = np.arange(max(k, 0), D + 1)
    ls = ms - k
    keep = ls <= D
    ms, ls = ms[keep], ls[keep]
    keep2 = ms + ls <= D
    ms, ls = ms[keep2], ls[keep2]
    if ms.size == 0:
        return None
    return coeffs[:, ms, ls], (ms + ls).astype(float)


def grid_inner_product(grid, u_values, v_values, conjugate_second=True):
    """Quadrature version of the inner product for pointwise data."""
    u_values = np.asarray(u_values, dtype=complex)
    v_values = np.asarray(v_values, dtype=complex)
    if u_values.ndim == 1:
        u_values = u_values[:, None]
    if v_values.ndim == 1:
        v_values = v_values[:, None]
    w = np.conj(v_values) if conjugate_second else v_values
    return complex(np.sum(grid.weights[:, None] * u_values * w))


def s_chi(chi, u):
    """S_chi u = (1/2 pi i) int chi u dzeta ^ dzetab = -(1/pi) int chi u dA."""
    return -inner_product(chi, u, conjugate_second=False) / np.pi


# ---- independent oracle ------------------------------------------------------

def cg_quadrature_oracle(u, zeta, n_alpha=128, n_rad=24, u_at=None):
    """Evaluate T u(zeta) by direct singular quadrature, |zeta| < 1.

    Subtracts the singularity, u(w) -> u(w) - u(zeta), integrates the bounded
    remainder on a polar rule centred at the singular point (uniform angles,
    Gauss-Legendre along each chord), and adds the closed form
    T(1)(zeta) = conj(zeta) times u(zeta).  Deliberately independent of the
    coefficient formula used by :func:`cauchy_green`.

    ``u`` is a callable on complex arrays; ``u_at`` optionally overrides the
    value u(zeta).
    """
    zeta = complex(zeta)
    if abs(zeta) >= 1.0:
        raise JDiscError("oracle requires an interior point")
    alpha = 2 * np.pi * np.arange(n_alpha) / n_alpha
    e = np.exp(1j * alpha)
    c = np.real(np.conj(zeta) * e)
    R = -c + np.sqrt(c * c + 1.0 - abs(zeta) ** 2)
    x, w = np.polynomial.legendre.leggauss(n_rad)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * w
    om = zeta + (R[:, None] * t[None, :]) * e[:, None]
    u0 = u(np.asarray([zeta]))[0] if u_at is None else u_at
    integrand = (u(om) - u0) * (np.conj(e) * R)[:, None]
    integral = np.sum(integrand @ wt) * (2 * np.pi / n_alpha)
    return -integral / np.pi + u0 * np.conj(zeta)
