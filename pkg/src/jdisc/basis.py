"""Internal orthonormal basis of the polynomial space on the disc.

The monomials zeta^m conj(zeta)^l form an exponentially ill-conditioned
frame of L2(D), so all dense linear algebra (operator matrices, SVDs,
solves) runs in an L2-orthonormal basis instead.  Per angular mode
k = m - l the radial span {r^(|k|+2j)} is orthonormalized against the disc
measure by an exact LDL^T factorization of its Hilbert-type Gram matrix in
rational arithmetic; the resulting radial functions are the monic shifted
Jacobi polynomials in r^2, evaluated stably by recurrence.

Coefficient layout: modes k = -N..N in order, each contributing
(N - |k|)//2 + 1 radial functions; vector fields stack one such block per
component.  Real coordinates are [Re x; Im x].
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .cgreen import SpectralField
from .errors import JDiscError

_EXTRA = 2  # spare radial functions per mode so degree-raising ops stay exact


def _mode_exact(n_funcs):
    """Exact monic orthogonal data for one mode: Gram 1/(off + t + t' + 1)."""
    # returns for offset ak: closure computing (X, D) with X unit upper
    # triangular columns of monic orthogonal polynomials over s^t
    def build(ak):
        ne = n_funcs
        G = [[Fraction(1, ak + t + tp + 1) for tp in range(ne)] for t in range(ne)]
        L = [[Fraction(0)] * ne for _ in range(ne)]
        D = [Fraction(0)] * ne
        for i in range(ne):
            D[i] = G[i][i] - sum(L[i][j] ** 2 * D[j] for j in range(i))
            L[i][i] = Fraction(1)
            for ii in range(i + 1, ne):
                L[ii][i] = (G[ii][i] - sum(L[ii][j] * L[i][j] * D[j] for j in range(i))) / D[i]
        X = [[Fraction(0)] * ne for _ in range(ne)]
        for j in range(ne):
            x = [Fraction(0)] * ne
            x[j] = Fraction(1)
            for i in range(j - 1, -1, -1):
                x[i] = -sum(L[ii][i] * x[ii] for ii in range(i + 1, j + 1))
            for i in range(ne):
                X[i][j] = x[i]
        return X, D

    return build


class _ModeData:
    """Radial orthonormal data for one angular mode."""

    __slots__ = ("k", "n", "ne", "X", "D", "X_float", "nrm", "offset")

    def __init__(self, k, n, offset):
        self.k = k
        self.n = n          # functions kept (degree budget)
        self.ne = n + _EXTRA  # functions carried for exact intermediate algebra
        self.offset = offset
        self.X, self.D = _mode_exact(self.ne)(abs(k))
        self.X_float = np.array([[float(self.X[i][j]) for j in range(self.ne)]
                                 for i in range(self.ne)])
        self.nrm = np.sqrt(np.pi * np.array([float(d) for d in self.D]))


class DiscBasis:
    """Orthonormal basis of span{zeta^m zetab^l : m + l <= degree}."""

    def __init__(self, degree):
        self.degree = int(degree)
        self.modes = {}
        off = 0
        for k in range(-self.degree, self.degree + 1):
            n = (self.degree - abs(k)) // 2 + 1
            self.modes[k] = _ModeData(k, n, off)
            off += n
        self.dim = off
        self._t0 = None
        self._t = None
        self._dz = None
        self._synth_cache = {}

    # ---- coordinate maps -----------------------------------------------------
    def to_on(self, field):
        """Monomial SpectralField -> complex ON coordinates (ncomp * dim)."""
        if field.degree() > self.degree:
            raise JDiscError(f"field degree {field.degree()} exceeds basis degree {self.degree}")
        c = field.with_capacity(self.degree).coeffs
        ncomp = c.shape[0]
        out = np.zeros((ncomp, self.dim), complex)
        for k, md in self.modes.items():
            ak = abs(k)
            ts = np.arange(md.n)
            ms = ts + max(k, 0)
            ls = ts + max(-k, 0)
            y = c[:, ms, ls]  # (ncomp, n)
            # solve X[:n,:n] z = y (unit upper triangular), then scale by norms
            z = np.zeros_like(y)
            X = md.X_float
            for i in range(md.n - 1, -1, -1):
                z[:, i] = y[:, i] - z[:, i + 1 : md.n] @ X[i, i + 1 : md.n]
            out[:, md.offset : md.offset + md.n] = z * md.nrm[: md.n]
        return out.ravel()

    def from_on(self, x, ncomp):
        """Complex ON coordinates -> monomial SpectralField."""
        x = np.asarray(x, dtype=complex).reshape(ncomp, self.dim)
        c = np.zeros((ncomp, self.degree + 1, self.degree + 1), complex)
        for k, md in self.modes.items():
            ts = np.arange(md.n)
            ms = ts + max(k, 0)
            ls = ts + max(-k, 0)
            z = x[:, md.offset : md.offset + md.n] / md.nrm[: md.n]
            c[:, ms, ls] = z @ md.X_float[: md.n, : md.n].T
        return SpectralField(c)

    def to_real(self, x):
        return np.concatenate([x.real, x.imag])

    def from_real(self, v):
        half = v.size // 2
        return v[:half] + 1j * v[half:]

    # ---- synthesis on point sets ----------------------------------------------
    def synth_matrix(self, points):
        """Matrix of basis-function values at points: (npts, dim) complex.

        Radial parts are normalized shifted Jacobi polynomials P_j^(0,|k|)
        in r^2, evaluated by the three-term recurrence.
        """
        pts = np.asarray(points, dtype=complex).ravel()
        key = (pts.tobytes(),)
        hit = self._synth_cache.get(key)
        if hit is not None:
            return hit
        r = np.abs(pts)
        s = r * r
        x = 2.0 * s - 1.0
        phase = np.ones_like(pts)
        S = np.zeros((pts.size, self.dim), complex)
        # walk modes 0, 1, -1, 2, -2, ... reusing radial tables per |k|
        for ak in range(0, self.degree + 1):
            n = (self.degree - ak) // 2 + 1
            P = _jacobi_table(ak, n, x)  # (n, npts), normalized
            radial = (r**ak)[None, :] * P * np.sqrt((ak + 2 * np.arange(n) + 1) / np.pi)[:, None]
            if ak == 0:
                md = self.modes[0]
                S[:, md.offset : md.offset + md.n] = radial.T
            else:
                phase = phase * pts / np.where(r > 0, r, 1.0)
                for k in (ak, -ak):
                    md = self.modes[k]
                    ph = phase if k > 0 else np.conj(phase)
                    block = radial * ph[None, :]
                    # r = 0: basis functions with |k| >= 1 vanish there
                    block[:, r == 0] = 0.0
                    S[:, md.offset : md.offset + md.n] = block.T
        self._synth_cache[key] = S
        return S

    def quadrature_maps(self, grid):
        """(S, A): synthesis and adjoint-projection matrices for a grid.

        A = S^H diag(weights) satisfies A @ S = I when the grid quadrature is
        exact for products of basis functions (n_r >= degree + 1).
        """
        if grid.max_exact_degree < 2 * self.degree:
            raise JDiscError("grid quadrature not exact for basis Gram")
        S = self.synth_matrix(grid.points)
        A = S.conj().T * grid.weights[None, :]
        return S, A

    # ---- exact operator blocks -------------------------------------------------
    def _on_coords_exact(self, k, rat_vec):
        """Exact rational s^t coords of mode k -> float ON coords (projected)."""
        md = self.modes[k]
        ne = md.ne
        y = list(rat_vec) + [Fraction(0)] * (ne - len(rat_vec))
        z = [Fraction(0)] * ne
        for i in range(ne - 1, -1, -1):
            z[i] = y[i] - sum(md.X[i][j] * z[j] for j in range(i + 1, ne))
        return np.array([float(z[j]) * md.nrm[j] for j in range(md.n)])

    def t0_matrix(self):
        """The recentered Cauchy-Green operator T_0 in ON coordinates."""
        if self._t0 is None:
            self._t0 = self._build_t(centered=True)
        return self._t0

    def t_matrix(self):
        if self._t is None:
            self._t = self._build_t(centered=False)
        return self._t

    def _build_t(self, centered):
        Tm = np.zeros((self.dim, self.dim))
        md0 = self.modes[0]
        for k in range(-self.degree, self.degree + 1):
            md = self.modes[k]
            ak = abs(k)
            kout = k - 1
            if kout < -self.degree:
                continue
            mdo = self.modes[kout]
            ako = abs(kout)
            for j in range(md.n):
                out = [Fraction(0)] * mdo.ne
                center = Fraction(0)
                for t in range(md.ne):
                    c = md.X[t][j]
                    if c == 0:
                        continue
                    m = (ak + 2 * t + k) // 2
                    l = (ak + 2 * t - k) // 2
                    t1 = (ak + 2 * t + 1 - ako) // 2
                    if t1 >= mdo.ne:
                        raise JDiscError("internal: spare radial functions exhausted")
                    out[t1] += c / (l + 1)
                    if m >= l + 1:
                        out[0] -= c / (l + 1)
                        if m - l - 1 == 0:
                            center += c / (l + 1)
                col = np.zeros(self.dim)
                col[mdo.offset : mdo.offset + mdo.n] = self._on_coords_exact(kout, out)
                if centered and center != 0:
                    col[md0.offset : md0.offset + md0.n] += self._on_coords_exact(0, [center])
                Tm[:, md.offset + j] = col / md.nrm[j]
        return Tm

    def dzeta_matrix(self):
        """d/dzeta in ON coordinates (exact)."""
        if self._dz is None:
            Dm = np.zeros((self.dim, self.dim))
            for k in range(-self.degree, self.degree + 1):
                md = self.modes[k]
                ak = abs(k)
                kout = k - 1
                if kout < -self.degree:
                    continue
                mdo = self.modes[kout]
                ako = abs(kout)
                for j in range(md.n):
                    out = [Fraction(0)] * mdo.ne
                    for t in range(md.ne):
                        c = md.X[t][j]
                        if c == 0:
                            continue
                        m = (ak + 2 * t + k) // 2
                        if m == 0:
                            continue
                        t1 = (ak + 2 * t - 1 - ako) // 2
                        if 0 <= t1 < mdo.ne:
                            out[t1] += m * c
                    col = np.zeros(self.dim)
                    col[mdo.offset : mdo.offset + mdo.n] = self._on_coords_exact(kout, out)
                    Dm[:, md.offset + j] = col / md.nrm[j]
            self._dz = Dm
        return self._dz

    def conj_permutation(self):
        """Permutation matrix C with (conj u)_on = C conj(u_on)."""
        Pm = np.zeros((self.dim, self.dim))
        for k, md in self.modes.items():
            md2 = self.modes[-k]
            for j in range(md.n):
                Pm[md2.offset + j, md.offset + j] = 1.0
        return Pm

    def constant_coords(self, value=1.0):
        """ON coordinates of the constant function `value`."""
        x = np.zeros(self.dim, complex)
        md = self.modes[0]
        x[md.offset : md.offset + md.n] = value * self._on_coords_exact(0, [Fraction(1)])
        return x


_BASIS_CACHE = {}


def get_basis(degree):
    """Shared per-degree DiscBasis instances (construction is exact but not free)."""
    if degree not in _BASIS_CACHE:
        _BASIS_CACHE[degree] = DiscBasis(degree)
    return _BASIS_CACHE[degree]


def _jacobi_table(m, n, x):
    """Values of normalized-by-recurrence P_j^(0,m)(x), j = 0..n-1, at points x.

    Uses the standard Jacobi three-term recurrence with (a, b) = (0, m);
    rows are the plain (unnormalized) Jacobi values.
    """
    out = np.empty((n, x.size))
    out[0] = 1.0
    if n > 1:
        out[1] = 0.5 * ((m + 2) * x - m)
    for j in range(2, n):
        a2 = 2 * j * (j + m) * (2 * j + m - 2)
        a1 = (2 * j + m - 1) * m * m
        a0 = (2 * j + m - 1) * (2 * j + m) * (2 * j + m - 2)
        a3 = 2 * (j - 1) * (j + m - 1) * (2 * j + m)
        out[j] = ((a0 * x - a1) * out[j - 1] - a3 * out[j - 2]) / a2
    return out


def real_embed_linear(C):
    """Real 2d x 2d matrix of a complex-linear map x -> C x."""
    return np.block([[C.real, -C.imag], [C.imag, C.real]])


def real_embed_antilinear(C):
    """Real 2d x 2d matrix of an antilinear map x -> C conj(x)."""
    return np.block([[C.real, C.imag], [C.imag, -C.real]])


def block_diag_per_component(M, ncomp):
    """kron(I_ncomp, M) without scipy."""
    if ncomp == 1:
        return M
    d = M.shape[0]
    out = np.zeros((ncomp * d, ncomp * d), dtype=M.dtype)
    for c in range(ncomp):
        out[c * d : (c + 1) * d, c * d : (c + 1) * d] = M
    return out
