"""Almost complex structures on domains of C^n via their complex matrices.

An R-linear J with J^2 = -I is encoded by the pair (L, M) acting as
u -> L u + M conj(u).  The correspondence with the complex matrix A goes
through the anti-linear Q = (J_st + J)^{-1} (J_st - J), A v = Q conj(v),
and back through

    J u = i (I - A conj(A))^{-1} [ (I + A conj(A)) u - 2 A conj(u) ].

Integrability is tested on the exact polynomial entries of A by

    N_jkl = d(a_jk)/d(conj z_l) + sum_s d(a_jk)/d(z_s) a_sl ,

symmetric in (k, l) iff the structure is integrable at the point.
"""
from __future__ import annotations

import itertools

import numpy as np

from .errors import JDiscError, NotAComplexStructure, SingularStructure
from .polynomial import PolynomialMap

DET_TOL = 1e-8          # relative guard for structure determinants
SQUARE_TOL = 1e-8       # relative guard for ||J^2 + I||
INTEGRABILITY_TOL = 1e-10


class RealLinearOp:
    """An R-linear operator u -> L u + M conj(u) on C^n."""

    __slots__ = ("L", "M")

    def __init__(self, L, M=None):
        self.L = np.asarray(L, dtype=complex)
        n = self.L.shape[0]
        self.M = np.zeros((n, n), complex) if M is None else np.asarray(M, dtype=complex)
        if self.L.shape != (n, n) or self.M.shape != (n, n):
            raise JDiscError("L and M must be square of equal size")

    @property
    def n(self):
        return self.L.shape[0]

    @classmethod
    def standard(cls, n):
        """Multiplication by i."""
        return cls(1j * np.eye(n))

    def __call__(self, v):
        v = np.asarray(v, dtype=complex)
        return self.L @ v + self.M @ np.conj(v)

    def compose(self, other):
        """self after other."""
        return RealLinearOp(
            self.L @ other.L + self.M @ np.conj(other.M),
            self.L @ other.M + self.M @ np.conj(other.L),
        )

    def __add__(self, other):
        return RealLinearOp(self.L + other.L, self.M + other.M)

    def __sub__(self, other):
        return RealLinearOp(self.L - other.L, self.M - other.M)

    def to_real_matrix(self):
        """2n x 2n real matrix over coordinates [Re v; Im v]."""
        L, M = self.L, self.M
        return np.block([
            [L.real + M.real, -L.imag + M.imag],
            [L.imag + M.imag, L.real - M.real],
        ])

    @classmethod
    def from_real_matrix(cls, R):
        n = R.shape[0] // 2
        A11, A12 = R[:n, :n], R[:n, n:]
        A21, A22 = R[n:, :n], R[n:, n:]
        L = (A11 + A22) / 2 + 1j * (A21 - A12) / 2
        M = (A11 - A22) / 2 + 1j * (A21 + A12) / 2
        return cls(L, M)

    def inverse(self):
        R = self.to_real_matrix()
        det = np.linalg.det(R)
        scale = max(1.0, np.linalg.norm(R, "fro") ** (2 * self.n))
        if abs(det) < DET_TOL * scale:
            raise SingularStructure(f"operator not invertible (det {det:.3e})")
        return RealLinearOp.from_real_matrix(np.linalg.inv(R))

    def square_defect(self):
        """|| J o J + I || over the standard basis and its i-multiples."""
        comp = self.compose(self)
        return float(np.linalg.norm(comp.L + np.eye(self.n)) + np.linalg.norm(comp.M))

    def is_complex_structure(self, tol=SQUARE_TOL):
        scale = 1.0 + float(np.linalg.norm(self.L) + np.linalg.norm(self.M)) ** 2
        return self.square_defect() <= tol * scale

    def __repr__(self):
        return f"RealLinearOp(n={self.n})"


def a_from_j(J):
    """Complex matrix A of a structure J, via the anti-linear quotient Q."""
    n = J.n
    scale = 1.0 + float(np.linalg.norm(J.L) + np.linalg.norm(J.M)) ** 2
    if J.square_defect() > SQUARE_TOL * scale:
        raise NotAComplexStructure(f"J^2 != -I (defect {J.square_defect():.3e})")
    Jst = RealLinearOp.standard(n)
    try:
        inv = (Jst + J).inverse()
    except SingularStructure as exc:
        raise SingularStructure(f"det(J_st + J) ~ 0: {exc}") from exc
    Q = inv.compose(Jst - J)
    # Q must be anti-linear; its linear part vanishes up to round-off
    if np.linalg.norm(Q.L) > 1e-6 * (1.0 + np.linalg.norm(Q.M)):
        raise NotAComplexStructure("quotient operator is not anti-linear")
    # A v = Q conj(v) = L_Q conj(v) + M_Q v, so A is the anti-linear part of Q
    return Q.M.copy()


def j_from_a(A):
    """Inverse map: J u = i (I - A conj(A))^{-1} [(I + A conj(A)) u - 2 A conj(u)]."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    AAb = A @ np.conj(A)
    G = np.eye(n) - AAb
    det = np.linalg.det(G)
    scale = (1.0 + np.linalg.norm(A) ** 2) ** n
    if abs(det) < DET_TOL * scale:
        raise SingularStructure(f"det(I - A conj(A)) ~ 0 ({det:.3e})")
    Ginv = np.linalg.inv(G)
    return RealLinearOp(1j * Ginv @ (np.eye(n) + AAb), -2j * Ginv @ A)


class StructureChart:
    """A structure on a chart of C^n: entries of A and b are exact polynomials.

    ``A`` is an (n, n) array of PolynomialMap in (zeta, conj zeta, z, conj z);
    ``b`` an n-vector of the same (defaults to zero).  Validity is sampled on
    a product lattice inside the ball of the given radius and guarded by
    det(I - A conj(A)) != 0.
    """

    def __init__(self, n, A=None, b=None, radius=1.0, validate=True):
        self.n = int(n)
        self.radius = float(radius)
        zero = PolynomialMap(self.n)
        if A is None:
            A = [[zero] * self.n for _ in range(self.n)]
        self.A = np.empty((self.n, self.n), dtype=object)
        for j in range(self.n):
            for k in range(self.n):
                entry = A[j][k]
                self.A[j, k] = entry if isinstance(entry, PolynomialMap) \
                    else PolynomialMap.constant(entry, self.n)
        self.b = np.empty(self.n, dtype=object)
        for j in range(self.n):
            entry = zero if b is None else b[j]
            self.b[j] = entry if isinstance(entry, PolynomialMap) \
                else PolynomialMap.constant(entry, self.n)
        self._dz_cache = {}
        if validate:
            rep = self.validity_report()
            if rep["min_abs_det"] < DET_TOL * rep["det_scale"]:
                raise SingularStructure(
                    f"det(I - A conj(A)) ~ 0 at lattice point {rep['worst_point']}")

    @classmethod
    def constant(cls, A, n=None, b=None, **kw):
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        n = n or A.shape[0]
        entries = [[PolynomialMap.constant(A[j, k], n) for k in range(n)] for j in range(n)]
        bv = None if b is None else [PolynomialMap.constant(c, n) for c in np.atleast_1d(b)]
        return cls(n, entries, bv, **kw)

    # ---- evaluation ---------------------------------------------------------
    def a_values(self, zeta, z):
        """A(zeta, z) with broadcasting; returns (..., n, n)."""
        zeta = np.asarray(zeta, dtype=complex)
        shape = np.broadcast_shapes(zeta.shape, np.asarray(z, dtype=complex).shape[:-1])
        out = np.zeros(shape + (self.n, self.n), complex)
        for j in range(self.n):
            for k in range(self.n):
                out[..., j, k] = self.A[j, k](zeta, z)
        return out

    def b_values(self, zeta, z):
        zeta = np.asarray(zeta, dtype=complex)
        shape = np.broadcast_shapes(zeta.shape, np.asarray(z, dtype=complex).shape[:-1])
        out = np.zeros(shape + (self.n,), complex)
        for j in range(self.n):
            out[..., j] = self.b[j](zeta, z)
        return out

    def partial(self, which, j, k, var):
        """Cached exact partials of entries: which in {'A','b'}, var ('z', s) or ('zb', s)."""
        key = (which, j, k, var)
        if key not in self._dz_cache:
            p = self.A[j, k] if which == "A" else self.b[j]
            kind, s = var
            self._dz_cache[key] = p.d_z(s) if kind == "z" else p.d_z_conj(s)
        return self._dz_cache[key]

    # ---- validity -----------------------------------------------------------
    def validity_lattice(self):
        """Default 5^n product lattice inside the ball of the chart radius."""
        step = 0.9 * self.radius / np.sqrt(self.n)
        axis = np.array([0.0, step, -step, 1j * step, -1j * step])
        pts = np.array(list(itertools.product(axis, repeat=self.n)), dtype=complex)
        return pts.reshape(-1, self.n)

    def zeta_samples(self):
        return np.array([0.0, 0.7, -0.7, 0.7j, -0.7j], dtype=complex)

    def validity_report(self):
        pts = self.validity_lattice()
        zetas = self.zeta_samples()
        worst = None
        min_det = np.inf
        max_norm = 0.0
        for zeta in zetas:
            Av = self.a_values(zeta, pts)  # (P, n, n)
            dets = np.linalg.det(np.eye(self.n)[None] - Av @ np.conj(Av))
            i = int(np.argmin(np.abs(dets)))
            if abs(dets[i]) < min_det:
                min_det = abs(dets[i])
                worst = (complex(zeta), pts[i].copy())
            max_norm = max(max_norm, float(np.linalg.norm(Av, axis=(1, 2)).max()))
        det_scale = (1.0 + max_norm**2) ** self.n
        return {
            "min_abs_det": float(min_det),
            "worst_point": worst,
            "max_A_norm": max_norm,
            "det_scale": det_scale,
        }

    def __repr__(self):
        return f"StructureChart(n={self.n}, radius={self.radius})"


def nijenhuis_tensor(chart, point, zeta=0j, tol=INTEGRABILITY_TOL):
    """Integrability tensor N_jkl at a point, exact polynomial derivatives.

    Returns (N, asymmetry, integrable_at_point) where asymmetry is
    max |N_jkl - N_jlk|; for n = 1 the condition is vacuous.
    """
    n = chart.n
    point = np.asarray(point, dtype=complex)
    Av = chart.a_values(zeta, point)
    N = np.zeros((n, n, n), complex)
    for j in range(n):
        for k in range(n):
            for l in range(n):
                val = chart.partial("A", j, k, ("zb", l))(zeta, point)
                for s in range(n):
                    val += chart.partial("A", j, k, ("z", s))(zeta, point) * Av[s, l]
                N[j, k, l] = val
    asym = float(np.abs(N - np.swapaxes(N, 1, 2)).max()) if n > 1 else 0.0
    return N, asym, asym < tol


def scalar_cr_residual(f, chart, point, zeta=0j, h=1e-5):
    """Row vector f_zbar + f_z A at a point for a scalar function f on C^n.

    ``f`` may be a PolynomialMap (exact derivatives) or a callable of the
    z-argument (central finite differences with step h).
    """
    n = chart.n
    point = np.asarray(point, dtype=complex)
    fz = np.zeros(n, complex)
    fzb = np.zeros(n, complex)
    if isinstance(f, PolynomialMap):
        for j in range(n):
            fz[j] = f.d_z(j)(zeta, point)
            fzb[j] = f.d_z_conj(j)(zeta, point)
    else:
        for j in range(n):
            e = np.zeros(n, complex)
            e[j] = 1.0
            dx = (f(point + h * e) - f(point - h * e)) / (2 * h)
            dy = (f(point + 1j * h * e) - f(point - 1j * h * e)) / (2 * h)
            fz[j] = (dx - 1j * dy) / 2
            fzb[j] = (dx + 1j * dy) / 2
    Av = chart.a_values(zeta, point)
    return fzb + fz @ Av
