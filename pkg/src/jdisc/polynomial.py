"""Exact complex polynomials in (zeta, conj(zeta), z_1..z_n, conj(z_1)..conj(z_n)).

Terms are stored as a dict keyed by exponent tuples, so partial derivatives
and evaluations are exact.  These polynomials carry the entries of structure
matrices and affine terms, and the defining maps of jet submanifolds.
"""
from __future__ import annotations

import numpy as np

from .errors import JDiscError


class PolynomialMap:
    """A polynomial with complex coefficients over 2 + 2n real-analytic variables.

    A term is keyed by ``((a, b), pz, pzb)`` where ``a, b`` are the powers of
    zeta and conj(zeta) and ``pz``, ``pzb`` are length-n tuples of powers of
    z_j and conj(z_j).  Duplicate keys are merged and zero coefficients
    dropped on construction.
    """

    __slots__ = ("num_vars_z", "terms")

    def __init__(self, num_vars_z, terms=None):
        self.num_vars_z = int(num_vars_z)
        normalized = {}
        for key, coeff in (terms or {}).items():
            key = self._check_key(key)
            c = normalized.get(key, 0j) + complex(coeff)
            if c != 0:
                normalized[key] = c
            elif key in normalized:
                del normalized[key]
        self.terms = normalized

    def _check_key(self, key):
        (a, b), pz, pzb = key
        pz, pzb = tuple(int(p) for p in pz), tuple(int(p) for p in pzb)
        if len(pz) != self.num_vars_z or len(pzb) != self.num_vars_z:
            raise JDiscError(f"exponent tuples must have length {self.num_vars_z}")
        if a < 0 or b < 0 or any(p < 0 for p in pz) or any(p < 0 for p in pzb):
            raise JDiscError("negative exponent in polynomial term")
        return ((int(a), int(b)), pz, pzb)

    # ---- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, c, n):
        zero = (0,) * n
        return cls(n, {((0, 0), zero, zero): complex(c)})

    @classmethod
    def coord(cls, j, n):
        """The coordinate function z_j (0-based)."""
        pz = tuple(1 if i == j else 0 for i in range(n))
        return cls(n, {((0, 0), pz, (0,) * n): 1.0})

    @classmethod
    def coord_conj(cls, j, n):
        pzb = tuple(1 if i == j else 0 for i in range(n))
        return cls(n, {((0, 0), (0,) * n, pzb): 1.0})

    @classmethod
    def zeta(cls, n):
        zero = (0,) * n
        return cls(n, {((1, 0), zero, zero): 1.0})

    @classmethod
    def zeta_conj(cls, n):
        zero = (0,) * n
        return cls(n, {((0, 1), zero, zero): 1.0})

    @classmethod
    def monomial(cls, n, coeff, pzeta=(0, 0), pz=None, pzb=None):
        pz = tuple(pz) if pz is not None else (0,) * n
        pzb = tuple(pzb) if pzb is not None else (0,) * n
        return cls(n, {(tuple(pzeta), pz, pzb): complex(coeff)})

    # ---- algebra -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        merged = dict(self.terms)
        for key, c in other.terms.items():
            merged[key] = merged.get(key, 0j) + c
        return PolynomialMap(self.num_vars_z, merged)

    __radd__ = __add__

    def __neg__(self):
        return PolynomialMap(self.num_vars_z, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for ((a1, b1), pz1, pzb1), c1 in self.terms.items():
            for ((a2, b2), pz2, pzb2), c2 in other.terms.items():
                key = (
                    (a1 + a2, b1 + b2),
                    tuple(p + q for p, q in zip(pz1, pz2)),
                    tuple(p + q for p, q in zip(pzb1, pzb2)),
                )
                out[key] = out.get(key, 0j) + c1 * c2
        return PolynomialMap(self.num_vars_z, out)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, PolynomialMap):
            if other.num_vars_z != self.num_vars_z:
                raise JDiscError("mixing polynomials over different variable counts")
            return other
        return PolynomialMap.constant(other, self.num_vars_z)

    def conj(self):
        """Complex conjugate polynomial (swaps holomorphic/antiholomorphic powers)."""
        out = {}
        for ((a, b), pz, pzb), c in self.terms.items():
            out[((b, a), pzb, pz)] = np.conj(c)
        return PolynomialMap(self.num_vars_z, out)

    # ---- calculus ----------------------------------------------------------
    def d_zeta(self):
        out = {}
        for ((a, b), pz, pzb), c in self.terms.items():
            if a > 0:
                out[((a - 1, b), pz, pzb)] = out.get(((a - 1, b), pz, pzb), 0j) + a * c
        return PolynomialMap(self.num_vars_z, out)

    def d_zeta_conj(self):
        out = {}
        for ((a, b), pz, pzb), c in self.terms.items():
            if b > 0:
                out[((a, b - 1), pz, pzb)] = out.get(((a, b - 1), pz, pzb), 0j) + b * c
        return PolynomialMap(self.num_vars_z, out)

    def d_z(self, j):
        """Exact partial derivative with respect to z_j."""
        out = {}
        for ((a, b), pz, pzb), c in self.terms.items():
            if pz[j] > 0:
                npz = tuple(p - 1 if i == j else p for i, p in enumerate(pz))
                key = ((a, b), npz, pzb)
                out[key] = out.get(key, 0j) + pz[j] * c
        return PolynomialMap(self.num_vars_z, out)

    def d_z_conj(self, j):
        out = {}
        for ((a, b), pz, pzb), c in self.terms.items():
            if pzb[j] > 0:
                npzb = tuple(p - 1 if i == j else p for i, p in enumerate(pzb))
                key = ((a, b), pz, npzb)
                out[key] = out.get(key, 0j) + pzb[j] * c
        return PolynomialMap(self.num_vars_z, out)

    # ---- evaluation --------------------------------------------------------
    def __call__(self, zeta=0j, z=None):
        """Evaluate at scalar or array arguments.

        ``zeta`` may be a complex scalar or array; ``z`` an array whose last
        axis has length n (broadcast against ``zeta``).  Returns a complex
        scalar or an array of the broadcast shape.
        """
        zeta = np.asarray(zeta, dtype=complex)
        if self.num_vars_z:
            if z is None:
                raise JDiscError("polynomial depends on z but no z supplied")
            z = np.asarray(z, dtype=complex)
            if z.shape[-1:] != (self.num_vars_z,):
                raise JDiscError(f"z must have trailing dimension {self.num_vars_z}")
        zb = np.conj(zeta)
        out = np.zeros(np.broadcast_shapes(zeta.shape, () if z is None else z.shape[:-1]), complex)
        for ((a, b), pz, pzb), c in self.terms.items():
            term = np.asarray(c * zeta**a * zb**b, dtype=complex)
            for j, p in enumerate(pz):
                if p:
                    term = term * z[..., j] ** p
            for j, p in enumerate(pzb):
                if p:
                    term = term * np.conj(z[..., j]) ** p
            out = out + term
        if out.ndim == 0:
            return complex(out)
        return out

    # ---- misc --------------------------------------------------------------
    def degree(self):
        if not self.terms:
            return 0
        return max(a + b + sum(pz) + sum(pzb) for ((a, b), pz, pzb) in self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, PolynomialMap):
            return NotImplemented
        return self.num_vars_z == other.num_vars_z and self.terms == other.terms

    def __hash__(self):
        return hash((self.num_vars_z, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"PolynomialMap(n={self.num_vars_z}, 0)"
        bits = []
        for ((a, b), pz, pzb), c in sorted(self.terms.items()):
            factors = []
            if a:
                factors.append(f"zeta^{a}" if a > 1 else "zeta")
            if b:
                factors.append(f"zetab^{b}" if b > 1 else "zetab")
            for j, p in enumerate(pz):
                if p:
                    factors.append(f"z{j+1}^{p}" if p > 1 else f"z{j+1}")
            for j, p in enumerate(pzb):
                if p:
                    factors.append(f"zb{j+1}^{p}" if p > 1 else f"zb{j+1}")
            bits.append(f"({c:g})" + ("*" + "*".join(factors) if factors else ""))
        return f"PolynomialMap(n={self.num_vars_z}, " + " + ".join(bits) + ")"
