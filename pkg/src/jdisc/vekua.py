"""Linear theory of generalized holomorphic vectors u_zbar = B1 u + B2 conj(u).

The central operator is P u = u - T_0(B1 u + B2 conj(u)), plus an optional
Beltrami term A_base conj(d u / d zeta) inside the bracket when the system
is a full linearization along a curved base map.  P is discretized in the
orthonormal disc basis, where the real coordinate geometry coincides with
the real L2 inner product Re(u, v); kernel vectors are detected by SVD and
lifted by the rank-one modification

    P~ u = P u + sum_j Re(u, w_j) p_j ,      p_j(0) = 0 ,

which preserves P~ u(0) = u(0) exactly.  Jets at the origin are prescribed
inductively: each order-k step solves the system with B2 replaced by
B2 e^{-2 i k theta} (applied pointwise on the assembly grid) and adds
zeta^k v.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import get_basis, real_embed_antilinear, real_embed_linear
from .cgreen import (
    DiscGrid,
    HolomorphicDatum,
    SpectralField,
    cauchy_green,
    inner_product,
)
from .errors import (
    ComplementNotFound,
    IllConditioned,
    JDiscError,
    ModeMismatch,
    SurjectivityFailed,
)

SVD_TOL = 1e-6            # relative kernel-detection threshold
COND_THRESHOLD = 1e10     # linear-solve conditioning guard
EPS_FRACTION = 1e-3       # default modification scale relative to ||P||


class MatrixField:
    """An n x n matrix of scalar spectral fields (coefficient storage)."""

    __slots__ = ("coeffs", "_values_cache")

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 4 or coeffs.shape[0] != coeffs.shape[1] \
                or coeffs.shape[2] != coeffs.shape[3]:
            raise JDiscError("matrix field coeffs must have shape (n, n, D+1, D+1)")
        self.coeffs = coeffs
        self._values_cache = {}

    @classmethod
    def zeros(cls, n, capacity=0):
        return cls(np.zeros((n, n, capacity + 1, capacity + 1), complex))

    @classmethod
    def constant(cls, A):
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        c = np.zeros(A.shape + (1, 1), complex)
        c[:, :, 0, 0] = A
        return cls(c)

    @classmethod
    def from_entries(cls, entries, n, capacity=None):
        """entries[j][k]: SpectralField (1 component), complex scalar, or None."""
        cap = capacity or 0
        for row in entries:
            for e in row:
                if isinstance(e, SpectralField):
                    cap = max(cap, e.capacity)
        c = np.zeros((n, n, cap + 1, cap + 1), complex)
        for j in range(n):
            for k in range(n):
                e = entries[j][k]
                if e is None:
                    continue
                if isinstance(e, SpectralField):
                    c[j, k, : e.capacity + 1, : e.capacity + 1] = e.coeffs[0]
                else:
                    c[j, k, 0, 0] = complex(e)
        return cls(c)

    @property
    def n(self):
        return self.coeffs.shape[0]

    @property
    def capacity(self):
        return self.coeffs.shape[2] - 1

    def degree(self):
        nz = np.argwhere(np.abs(self.coeffs).sum(axis=(0, 1)) != 0)
        return 0 if nz.size == 0 else int((nz[:, 0] + nz[:, 1]).max())

    def entry(self, j, k):
        return SpectralField(self.coeffs[j, k][None])

    def is_zero(self):
        return not np.any(self.coeffs)

    def values(self, grid):
        """(grid.size, n, n) matrix values, cached per grid."""
        key = id(grid)
        hit = self._values_cache.get(key)
        if hit is not None and hit[0] is grid:
            return hit[1]
        zp, zbp = grid.zeta_powers(self.capacity)
        vals = np.einsum("jkml,mp,lp->pjk", self.coeffs, zp, zbp)
        self._values_cache[key] = (grid, vals)
        return vals

    def eval(self, points):
        pts = np.asarray(points, dtype=complex).ravel()
        D = self.capacity
        zp = np.ones((D + 1, pts.size), complex)
        for m in range(1, D + 1):
            zp[m] = zp[m - 1] * pts
        return np.einsum("jkml,mp,lp->pjk", self.coeffs, zp, np.conj(zp))

    def norm_sup(self, grid):
        """max over grid of the spectral norm of the matrix value."""
        v = self.values(grid)
        return float(np.linalg.norm(v, ord=2, axis=(1, 2)).max())

    def __repr__(self):
        return f"MatrixField(n={self.n}, degree={self.degree()})"


class LinearCRSystem:
    """Coefficients (B1, B2) of u_zbar = B1 u + B2 conj(u), plus options.

    ``a_base`` (default None) is the Beltrami base matrix of a full
    linearization: the operator bracket gains A_base conj(du/dzeta).  All
    coefficient fields share the degree budget ``degree``.
    """

    def __init__(self, n, b1=None, b2=None, a_base=None, degree=16):
        self.n = int(n)
        self.degree = int(degree)
        if self.degree % 2:
            # odd budgets would truncate mode-0 output of T_0 at the top degree
            # and the exact center preservation P~u(0) = u(0) would be lost
            raise JDiscError("degree budget must be even")
        self.b1 = b1 if b1 is not None else MatrixField.zeros(self.n)
        self.b2 = b2 if b2 is not None else MatrixField.zeros(self.n)
        self.a_base = a_base
        for name, mf in (("b1", self.b1), ("b2", self.b2), ("a_base", self.a_base)):
            if mf is None:
                continue
            if mf.n != self.n:
                raise JDiscError(f"{name} has size {mf.n}, expected {self.n}")
            if mf.degree() > self.degree:
                raise JDiscError(f"{name} exceeds the degree budget {self.degree}")

    @property
    def has_beltrami(self):
        return self.a_base is not None and not self.a_base.is_zero()

    def __repr__(self):
        return (f"LinearCRSystem(n={self.n}, degree={self.degree}, "
                f"beltrami={self.has_beltrami})")


# ---- assembly workspace --------------------------------------------------------

_WORKSPACES = {}


class Workspace:
    """Cached per-(n, degree) assembly data in the orthonormal basis."""

    def __init__(self, n, degree):
        self.n = n
        self.degree = degree
        self.basis = get_basis(degree)
        self.dim = n * self.basis.dim
        # assembly grid: dealiased for products of two budget-degree fields,
        # angular budget doubled relative to the default user grid
        self.grid = DiscGrid(2 * degree + 6, 4 * degree + 32)
        self.S, self.A = self.basis.quadrature_maps(self.grid)
        self.Sc = np.conj(self.S)
        self.t0 = self.basis.t0_matrix()
        self.t_plain = self.basis.t_matrix()
        self.dz = self.basis.dzeta_matrix()

    def to_real(self, fld):
        x = np.concatenate([self.basis.to_on(fld.component(c)) for c in range(self.n)])
        return np.concatenate([x.real, x.imag])

    def from_real(self, v):
        x = v[: self.dim] + 1j * v[self.dim :]
        comps = [self.basis.from_on(x[c * self.basis.dim : (c + 1) * self.basis.dim], 1)
                 for c in range(self.n)]
        return SpectralField.stack(comps)

    def project_values(self, values):
        """Grid values (assembly grid) -> stacked complex ON coordinates."""
        coords = self.A @ values  # (dim_basis, ncomp)
        return coords.T.ravel()

    def project_field(self, fld):
        """L2-orthogonal projection of a field of any degree onto the budget."""
        if fld.degree() <= self.degree:
            return np.concatenate([self.basis.to_on(fld.component(c))
                                   for c in range(self.n)])
        if fld.degree() > 2 * self.degree:
            raise JDiscError("field degree beyond assembly-grid exactness")
        return self.project_values(fld.values(self.grid))

    def mult_blocks(self, mat_values, conj_input):
        """Complex block matrix of u -> M u (or M conj(u)) from matrix values."""
        n, K = self.n, self.basis.dim
        Sm = self.Sc if conj_input else self.S
        out = np.zeros((n * K, n * K), complex)
        for j in range(n):
            for k in range(n):
                v = mat_values[:, j, k]
                if not np.any(v):
                    continue
                out[j * K : (j + 1) * K, k * K : (k + 1) * K] = self.A @ (v[:, None] * Sm)
        return out

    def block_diag(self, M):
        if self.n == 1:
            return M
        K = self.basis.dim
        out = np.zeros((self.n * K, self.n * K), dtype=M.dtype)
        for c in range(self.n):
            out[c * K : (c + 1) * K, c * K : (c + 1) * K] = M
        return out

    def assemble(self, b1_values, b2_values, a_base_values=None, centered=True):
        """Real matrix of P from coefficient values on the assembly grid."""
        T0 = self.block_diag(self.t0 if centered else self.t_plain)
        total = np.eye(2 * self.dim)
        if b1_values is not None and np.any(b1_values):
            C1 = self.mult_blocks(b1_values, conj_input=False)
            total -= real_embed_linear(T0 @ C1)
        if b2_values is not None and np.any(b2_values):
            C2 = self.mult_blocks(b2_values, conj_input=True)
            total -= real_embed_antilinear(T0 @ C2)
        if a_base_values is not None and np.any(a_base_values):
            CA = self.mult_blocks(a_base_values, conj_input=True) @ self.block_diag(self.dz)
            total -= real_embed_antilinear(T0 @ CA)
        return total


def get_workspace(n, degree):
    key = (n, degree)
    if key not in _WORKSPACES:
        _WORKSPACES[key] = Workspace(n, degree)
    return _WORKSPACES[key]


# ---- discretized operator -------------------------------------------------------

@dataclass
class DiscretizedOperator:
    """Dense real-linear matrix of P over the real coordinates of the
    orthonormal coefficient space, with its provenance."""

    matrix: np.ndarray
    workspace: Workspace
    system: LinearCRSystem | None = None
    mode: str = "P"
    modification: "FredholmModification | None" = None
    _svd: tuple | None = None

    @property
    def n(self):
        return self.workspace.n

    def singular_values(self):
        if self._svd is None:
            self._svd = np.linalg.svd(self.matrix)
        return self._svd[1]

    def svd(self):
        if self._svd is None:
            self._svd = np.linalg.svd(self.matrix)
        return self._svd

    def sigma_min(self):
        return float(self.singular_values()[-1])

    def sigma_max(self):
        return float(self.singular_values()[0])

    def condition_number(self):
        s = self.singular_values()
        return float(s[0] / s[-1]) if s[-1] > 0 else np.inf

    def apply_to_field(self, u):
        v = self.workspace.to_real(u)
        return self.workspace.from_real(self.matrix @ v)

    def modified(self, modification):
        """P~ = P + sum_j col(p_j) row(Re(., w_j))."""
        if not modification.corrections:
            return self
        M = self.matrix.copy()
        ws = self.workspace
        for w, p in zip(modification.kernel, modification.corrections):
            col = ws.to_real(p.to_field())
            row = ws.to_real(w)
            M = M + np.outer(col, row)
        return DiscretizedOperator(M, ws, self.system, self.mode, modification)


def discretize(sys, centered=True):
    """Assemble the discretized P for a system (exact on the degree budget)."""
    ws = get_workspace(sys.n, sys.degree)
    b1v = sys.b1.values(ws.grid) if not sys.b1.is_zero() else None
    b2v = sys.b2.values(ws.grid) if not sys.b2.is_zero() else None
    abv = sys.a_base.values(ws.grid) if sys.has_beltrami else None
    return DiscretizedOperator(ws.assemble(b1v, b2v, abv, centered), ws, sys)


# ---- functional operator application ----------------------------------------------

def apply_operator(sys, u, mode="P", modification=None, grid=None):
    """Apply P, P* or P~ to a field, independently of the assembled matrix.

    P and P~ run the grid pipeline (pointwise products, quadrature projection,
    exact T_0) and return a field on the degree budget.  P* realizes the
    adjoint identity Re(Pu, v) = Re(u, P*v): divisions by zeta and conj(zeta)
    are done pointwise on the polar grid (which excludes the origin) and the
    result is re-analyzed; use :func:`p_star_values` for quadrature against
    grid data.
    """
    ws = get_workspace(sys.n, sys.degree)
    if mode in ("P", "P_tilde"):
        if mode == "P_tilde" and modification is None:
            raise ModeMismatch("P_tilde requested without a modification")
        uv = u.values(ws.grid)
        w = np.zeros_like(uv)
        if not sys.b1.is_zero():
            w += np.einsum("pjk,pk->pj", sys.b1.values(ws.grid), uv)
        if not sys.b2.is_zero():
            w += np.einsum("pjk,pk->pj", sys.b2.values(ws.grid), np.conj(uv))
        if sys.has_beltrami:
            dzu = u.dzeta().values(ws.grid)
            w += np.einsum("pjk,pk->pj", sys.a_base.values(ws.grid), np.conj(dzu))
        coords = ws.project_values(w)
        t0w = _apply_block(ws, ws.t0, coords)
        out = _field_from_coords(ws, ws.project_field(u) - t0w)
        if mode == "P_tilde":
            for wj, pj in zip(modification.kernel, modification.corrections):
                out = out + inner_product(u, wj).real * pj.to_field(sys.degree)
        return out
    if mode == "P_star":
        from .cgreen import analyze

        grid = grid or ws.grid
        vals = p_star_values(sys, u, grid)
        return analyze(grid, vals, sys.degree)
    raise ModeMismatch(f"unknown mode {mode!r}")


def _apply_block(ws, M, coords):
    K = ws.basis.dim
    out = np.empty_like(coords)
    for c in range(ws.n):
        out[c * K : (c + 1) * K] = M @ coords[c * K : (c + 1) * K]
    return out


def _field_from_coords(ws, coords):
    K = ws.basis.dim
    return SpectralField.stack(
        [ws.basis.from_on(coords[c * K : (c + 1) * K], 1) for c in range(ws.n)])


def p_star_values(sys, v, grid):
    """Pointwise values of P* v on a grid.

    P* v = v + zetab^{-1} B1* Tbar(zetab v) + zeta^{-1} conj(B2)* T(zeta conj v),
    with B* the pointwise hermitian transpose.  The zeta^{+-1} factors act on
    grid values only; the grid has no node at the origin.
    """
    if sys.has_beltrami:
        raise ModeMismatch("P* is implemented for the pure (B1, B2) form")
    pts = grid.points
    vv = v.values(grid)
    # Tbar(zetab v) = conj(T(zeta conj v)); both ingredients are polynomial
    zeta_vbar = v.conj().shift_zeta(1)
    T_zeta_vbar = cauchy_green(zeta_vbar)
    tv = T_zeta_vbar.values(grid)
    out = vv.copy()
    if not sys.b1.is_zero():
        B1v = sys.b1.values(grid)
        herm1 = np.conj(np.swapaxes(B1v, 1, 2))
        out += np.einsum("pjk,pk->pj", herm1, np.conj(tv)) / np.conj(pts)[:, None]
    if not sys.b2.is_zero():
        B2v = sys.b2.values(grid)
        transp2 = np.swapaxes(B2v, 1, 2)  # conj(B2)* = B2^T
        out += np.einsum("pjk,pk->pj", transp2, tv) / pts[:, None]
    return out


# ---- kernel detection and modification ----------------------------------------------

def kernel_basis(sys, svd_tol=SVD_TOL, operator=None):
    """Approximate kernel of P: right singular vectors below svd_tol * sigma_max.

    The real coordinates of the orthonormal basis carry exactly the real L2
    geometry, so the returned fields are Re(.,.)-orthonormal as delivered.
    """
    if sys is not None and sys.has_beltrami:
        raise ModeMismatch("kernel detection requires a_base = 0")
    op = operator if operator is not None else discretize(sys)
    _, s, Vt = op.svd()
    cut = svd_tol * s[0]
    rows = np.nonzero(s < cut)[0]
    ws = op.workspace
    kernel = [ws.from_real(Vt[i]) for i in rows]
    return kernel, len(kernel)


@dataclass
class FredholmModification:
    """Rank-one corrections sum_j Re(u, w_j) p_j with holomorphic p_j, p_j(0)=0."""

    kernel: list          # fields w_j
    corrections: list     # HolomorphicDatum p_j, vanishing at zero
    scale: float
    candidate_info: list = field(default_factory=list)  # (component, degree)

    @property
    def d(self):
        return len(self.kernel)

    @classmethod
    def empty(cls):
        return cls([], [], 0.0)

    def report(self):
        return {
            "d": self.d,
            "corrections": [
                {"basis_index": int(c), "degree": int(m), "scale": self.scale}
                for (c, m) in self.candidate_info
            ],
        }


def _monomial_datum(n, comp, m, scale):
    """p = scale * e_comp zeta^m / ||zeta^m||_{L2}, as a holomorphic datum."""
    taylor = np.zeros((n, m + 1), complex)
    taylor[comp, m] = scale / np.sqrt(np.pi / (m + 1))
    return HolomorphicDatum(taylor, vanishes_at_zero=(m > 0))


def build_modification(sys, kernel, eps=None, operator=None, lift_factor=0.1):
    """Greedy holomorphic corrections e_i zeta^m making the operator injective.

    Candidates are coordinate monomials of degree 1..N, each scaled to L2 norm
    eps; candidates are ranked by the smallest singular value of the modified
    matrix at unit scale, so halving eps halves ||p_j|| without changing the
    selection.  Raises ComplementNotFound if no candidate lifts a direction.
    """
    op = operator if operator is not None else discretize(sys)
    ws = op.workspace
    if not kernel:
        return FredholmModification.empty()
    sigma_max = op.sigma_max()
    if eps is None:
        eps = EPS_FRACTION * sigma_max
    n, N = ws.n, ws.degree
    candidates = [(c, m) for m in range(1, N + 1) for c in range(n)]
    chosen = []
    chosen_info = []
    M = op.matrix.copy()
    for w in kernel:
        row = ws.to_real(w)
        best = None
        for (c, m) in candidates:
            if (c, m) in chosen_info:
                continue
            p_unit = _monomial_datum(n, c, m, 1.0)
            col = ws.to_real(p_unit.to_field(N))
            trial = M + np.outer(col, row)
            smin = np.linalg.svd(trial, compute_uv=False)[-1]
            if best is None or smin > best[0]:
                best = (smin, (c, m), trial)
        if best is None or best[0] <= op.sigma_min() + 1e-14:
            raise ComplementNotFound(
                "no monomial candidate lifts the kernel direction")
        _, pick, M = best
        chosen.append(_monomial_datum(n, pick[0], pick[1], eps))
        chosen_info.append(pick)
    mod = FredholmModification(list(kernel), chosen, float(eps), chosen_info)
    # final check at the requested scale
    lifted = op.modified(mod)
    if lifted.sigma_min() <= lift_factor * min(eps, sigma_max):
        raise ComplementNotFound(
            f"modification lifts sigma_min only to {lifted.sigma_min():.3e}")
    return mod


# ---- linear solves ---------------------------------------------------------------

def solve_linear(sys, modification=None, rhs=None, grid=None,
                 cond_threshold=COND_THRESHOLD, centered=True):
    """Solve P~ u = phi (holomorphic datum) or the nonhomogeneous equation.

    For a HolomorphicDatum phi the solution satisfies u_zbar = B1 u + B2 conj u
    with u(0) = phi(0).  For a SpectralField psi it returns u = P~^{-1} T psi,
    a solution of u_zbar = B1 u + B2 conj u + psi.  Returns (u, report).
    """
    op = discretize(sys, centered=centered)
    mod = modification or FredholmModification.empty()
    tilde = op.modified(mod)
    cond = tilde.condition_number()
    if cond > cond_threshold:
        raise IllConditioned(f"condition number {cond:.3e}")
    ws = op.workspace
    if isinstance(rhs, HolomorphicDatum):
        rhs_field = rhs.to_field(sys.degree)
        psi = None
    elif isinstance(rhs, SpectralField):
        psi = rhs
        rhs_field = cauchy_green(rhs, max_degree=sys.degree + 1)
    else:
        raise JDiscError("rhs must be a HolomorphicDatum or a SpectralField")
    b = ws.project_field(rhs_field)
    sol = np.linalg.solve(tilde.matrix, np.concatenate([b.real, b.imag]))
    u = ws.from_real(sol)
    report = residual_report(sys, u, psi=psi, grid=grid)
    report["condition_number"] = cond
    return u, report


def residual_report(sys, u, psi=None, grid=None):
    """Grid residual of u_zbar - B1 u - B2 conj(u) (- beltrami term) (- psi)."""
    from .cgreen import grid_for_degree

    grid = grid or grid_for_degree(sys.degree)
    r = u.dzetabar().values(grid)
    uv = u.values(grid)
    if not sys.b1.is_zero():
        r = r - np.einsum("pjk,pk->pj", sys.b1.values(grid), uv)
    if not sys.b2.is_zero():
        r = r - np.einsum("pjk,pk->pj", sys.b2.values(grid), np.conj(uv))
    if sys.has_beltrami:
        r = r - np.einsum("pjk,pk->pj", sys.a_base.values(grid),
                          np.conj(u.dzeta().values(grid)))
    if psi is not None:
        r = r - psi.values(grid)
    norm = float(np.sqrt(grid.integrate(np.abs(r) ** 2).sum().real))
    return {
        "residual_norm": norm,
        "center_value": u.eval(np.array(0j)),
    }


# ---- jets -------------------------------------------------------------------------

@dataclass
class JetVector:
    """Holomorphic jet j^k u(zeta0) = (u, d u, ..., d^k u) at a point."""

    zeta0: complex
    values: np.ndarray  # (k+1, ncomp)

    def __post_init__(self):
        self.zeta0 = complex(self.zeta0)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=complex))
        if not np.all(np.isfinite(self.values)):
            raise JDiscError("jet entries must be finite")

    @property
    def order(self):
        return self.values.shape[0] - 1

    @property
    def ncomp(self):
        return self.values.shape[1]

    def norm(self):
        return float(np.abs(self.values).max())


def jet_eval(u, zeta0, k):
    """Exact holomorphic k-jet of a field at |zeta0| <= 1."""
    zeta0 = complex(zeta0)
    if abs(zeta0) > 1 + 1e-12:
        raise JDiscError("jet evaluation point outside the closed disc")
    if k > u.capacity:
        raise JDiscError(f"jet order {k} exceeds field capacity {u.capacity}")
    rows = []
    d = u
    for _ in range(k + 1):
        rows.append(d.eval(np.array(zeta0)))
        d = d.dzeta()
    return JetVector(zeta0, np.vstack(rows))


class _JetLadder:
    """Shared twisted-operator ladder for jet prescription at the origin."""

    def __init__(self, sys, modification, k, svd_tol=SVD_TOL):
        if sys.has_beltrami:
            raise ModeMismatch("jet prescription requires a_base = 0")
        self.sys = sys
        self.k = k
        ws = get_workspace(sys.n, sys.degree)
        self.ws = ws
        b1v = sys.b1.values(ws.grid) if not sys.b1.is_zero() else None
        b2v = sys.b2.values(ws.grid) if not sys.b2.is_zero() else None
        phase = np.conj(ws.grid.points) / ws.grid.points
        self.levels = []
        for j in range(k + 1):
            if j == 0:
                op = DiscretizedOperator(ws.assemble(b1v, b2v), ws, sys)
                mod = modification or FredholmModification.empty()
            else:
                tb2 = None if b2v is None else b2v * (phase**j)[:, None, None]
                op = DiscretizedOperator(ws.assemble(b1v, tb2), ws, None)
                mod = FredholmModification.empty()
            tilde = op.modified(mod) if mod.corrections else op
            if tilde.sigma_min() < svd_tol * tilde.sigma_max():
                # the twisted system needs its own modification (Thm-3.1 style)
                kern = [ws.from_real(tilde.svd()[2][i])
                        for i in np.nonzero(tilde.singular_values()
                                            < svd_tol * tilde.sigma_max())[0]]
                mod_j = build_modification(None, kern, operator=tilde)
                tilde = tilde.modified(mod_j)
            self.levels.append(tilde)

    def solve(self, target):
        """Solve for prescribed jets a_0..a_k at 0; exact coefficient pinning."""
        ws = self.ws
        a = target.values
        rhs = _constant_rhs(ws, a[0])
        u = ws.from_real(np.linalg.solve(self.levels[0].matrix, rhs))
        u = u.with_capacity(self.sys.degree)
        for j in range(1, self.k + 1):
            cj = u.coefficient(j, 0)
            b = (a[j] - math.factorial(j) * cj) / math.factorial(j)
            vj = ws.from_real(np.linalg.solve(self.levels[j].matrix,
                                              _constant_rhs(ws, b)))
            # u += zeta^j v, dropping overflow; c_{m,0} for m <= j is untouched,
            # so the prescribed jets survive the truncation exactly
            u = u + vj.shift_zeta(j).truncated(self.sys.degree).with_capacity(self.sys.degree)
        return u


def _constant_rhs(ws, vec):
    K = ws.basis.dim
    x = np.zeros(ws.dim, complex)
    for c in range(ws.n):
        x[c * K : (c + 1) * K] = ws.basis.constant_coords(vec[c])
    return np.concatenate([x.real, x.imag])


def solve_with_jet(sys, modification, target):
    """A solution u of the linear system with d^j u(0) = a_j for 0 <= j <= k."""
    if abs(target.zeta0) != 0:
        raise JDiscError("jet prescription is anchored at zeta0 = 0")
    if target.ncomp != sys.n:
        raise JDiscError("jet target has wrong component count")
    ladder = _JetLadder(sys, modification, target.order)
    return ladder.solve(target)


# ---- spanning families ---------------------------------------------------------------

@dataclass
class SpanningFamily:
    """Solutions whose k-jets span (C^n)^(k+1) over R at every checked point."""

    members: list
    order: int
    sigma_min: float
    worst_point: complex
    n_checked: int

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]


def _unit_jet_targets(n, k):
    targets = []
    for order in range(k + 1):
        for c in range(n):
            for mult in (1.0, 1j):
                a = np.zeros((k + 1, n), complex)
                a[order, c] = mult
                targets.append(JetVector(0j, a))
    return targets


def jet_matrix_at(members, k, points):
    """Real jet-evaluation matrices: (npts, 2 n (k+1), len(members))."""
    pts = np.asarray(points, dtype=complex).ravel()
    n = members[0].ncomp
    rows = 2 * n * (k + 1)
    M = np.empty((pts.size, rows, len(members)))
    for i, u in enumerate(members):
        d = u
        for order in range(k + 1):
            vals = d.eval(pts)  # (npts, n)
            base = 2 * n * order
            M[:, base : base + n, i] = vals.real
            M[:, base + n : base + 2 * n, i] = vals.imag
            d = d.dzeta()
    return M


def default_sample_points():
    """Covering samples of the closed disc: center plus a ring at r = 0.7."""
    ring = 0.7 * np.exp(2j * np.pi * np.arange(7) / 7)
    return np.concatenate([[0.0 + 0j], ring])


def spanning_family(sys, modification, k, sample_points=None, grid=None,
                    sigma_tol=1e-6, max_extra_orders=3):
    """A finite family of solutions with surjective k-jets on the closed disc.

    For a pure (B1, B2) system the base family prescribes unit jets at the
    origin; with a Beltrami term, solutions are pulled back from monomial
    holomorphic data instead.  Full rank 2n(k+1) is verified at the grid
    points, a boundary ring, and the covering samples; extra directions from
    higher-order data are added if the rank margin fails, else
    SurjectivityFailed is raised.
    """
    from .cgreen import grid_for_degree

    n = sys.n
    grid = grid or grid_for_degree(sys.degree)
    pts = np.concatenate([
        grid.points,
        np.exp(2j * np.pi * np.arange(grid.n_theta) / grid.n_theta),
        default_sample_points() if sample_points is None else np.asarray(sample_points),
    ])
    members = []
    if sys.has_beltrami:
        for order in range(k + 1):
            for c in range(n):
                for mult in (1.0, 1j):
                    taylor = np.zeros((n, order + 1), complex)
                    taylor[c, order] = mult
                    u, _ = solve_linear(sys, modification, HolomorphicDatum(taylor))
                    members.append(u)
    else:
        ladder = _JetLadder(sys, modification, k)
        members = [ladder.solve(t) for t in _unit_jet_targets(n, k)]

    def rank_report(mem):
        M = jet_matrix_at(mem, k, pts)
        s = np.linalg.svd(M, compute_uv=False)[:, -1]
        i = int(np.argmin(s))
        return float(s[i]), complex(pts[i])

    smin, worst = rank_report(members)
    extra = 0
    while smin <= sigma_tol and extra < max_extra_orders:
        extra += 1
        order = k + extra
        for c in range(n):
            for mult in (1.0, 1j):
                taylor = np.zeros((n, order + 1), complex)
                taylor[c, order] = mult
                u, _ = solve_linear(sys, modification, HolomorphicDatum(taylor))
                members.append(u)
        smin, worst = rank_report(members)
    if smin <= sigma_tol:
        raise SurjectivityFailed(
            f"jet rank deficient: sigma_min {smin:.3e} at {worst}",
            worst_point=worst, sigma_min=smin)
    return SpanningFamily(members, k, smin, worst, pts.size)
