"""Truncated Krein-Fock space tensored with a Hermite zero-mode sector.

The one-particle subspace is spanned by Krein-orthonormal vectors ``e_j``
with ``<e_i, e_j> = s_j delta_ij``.  On occupation states ``|n>`` the ladder
matrices are the usual ``a_j |n> = sqrt(n_j) |n - e_j>`` and

    a(psi)  = sum_j conj(c_j) s_j a_j,     a*(psi) = sum_j c_j a_j^dagger,

with ``c_j = s_j <e_j, psi>``, so ``[a(psi), a*(phi)] = <psi, phi>`` below the
cutoff.  The Fock fundamental symmetry is ``J_F = prod_j s_j^{n_j}``.

The zero-mode sector realizes ``A_J(f) = a . x + i b . grad`` on a Hermite
basis with total degree below ``Mh``, where ``a`` are the ``Y`` coordinates of
``nu(f)`` and ``b = J nu_2(f)``.

The field operator uses ``conj(kappa(f))`` as the one-particle argument.  With
the inner product conjugate-linear in the first slot this orients
``[A(f), A(g)] = -i G(f, g)``.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, DomainError, TruncationError
from .one_particle import KreinVector, _pj_modes, _tau_modes, krein_inner
from .spacetime_forms import SampledForm, lorentz_pairing, st_exterior_derivative

__all__ = [
    "FockBasis",
    "HermiteSector",
    "GBOperator",
    "GBSpace",
    "build_fock",
    "occupation_states",
    "fock_dimension",
]

SPAN_TOL = 1e-6


def occupation_states(modes, cutoff):
    """All occupation tuples over ``modes`` with total at most ``cutoff``, graded by total."""
    states = []
    for n in range(cutoff + 1):
        for combo in combinations_with_replacement(range(modes), n):
            occ = [0] * modes
            for j in combo:
                occ[j] += 1
            states.append(tuple(occ))
    return states


def fock_dimension(m, N):
    return sum(comb(m + k - 1, k) for k in range(N + 1))


def _ladder(states, index, j):
    rows, cols, vals = [], [], []
    for col, occ in enumerate(states):
        if occ[j] > 0:
            lower = list(occ)
            lower[j] -= 1
            rows.append(index[tuple(lower)])
            cols.append(col)
            vals.append(np.sqrt(occ[j]))
    n = len(states)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


class FockBasis:
    """Occupation basis over a Krein-orthonormalized one-particle subspace.

    Parameters
    ----------
    vectors : list of KreinVector
        Generating family, linearly independent.
    N : int
        Particle cutoff.
    rank_tol : float
        Relative singular-value threshold for independence.
    """

    def __init__(self, vectors, N=3, rank_tol=1e-8):
        if not vectors:
            raise ConfigurationError("Fock basis needs at least one generating vector")
        if N < 0:
            raise ConfigurationError("particle cutoff must be non-negative")
        self.structure = vectors[0].structure
        A = np.column_stack([v.array for v in vectors])
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] <= rank_tol * sv[0]:
            Q, R = np.linalg.qr(A)
            dep = [i for i in range(A.shape[1]) if abs(R[i, i]) <= rank_tol * sv[0]]
            raise ConfigurationError(f"generating vectors are linearly dependent (indices {dep})")
        Q, _ = np.linalg.qr(A)
        signs = np.concatenate([-np.ones(self.structure.dims[0]), np.ones(self.structure.dims[1])])
        gram = Q.conj().T @ (signs[:, None] * Q)
        gram = 0.5 * (gram + gram.conj().T)
        d, U = np.linalg.eigh(gram)
        if np.min(np.abs(d)) <= rank_tol:
            raise ConfigurationError("span contains Krein-null directions; no orthonormal basis exists")
        E = (Q @ U) / np.sqrt(np.abs(d))
        self.matrix = E
        self.signs = np.sign(d)
        self.m = E.shape[1]
        self.N = N
        self.states = occupation_states(self.m, N)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.dim = len(self.states)
        self.particles = np.array([sum(s) for s in self.states])
        self.lower = [_ladder(self.states, self.index, j) for j in range(self.m)]
        occ = np.array(self.states, dtype=int).reshape(self.dim, self.m)
        self.J = np.prod(np.where(occ % 2 == 1, self.signs[None, :], 1.0), axis=1)

    @property
    def vectors(self):
        return [KreinVector.from_array(self.structure, c) for c in self.matrix.T]

    def gram(self):
        s = np.concatenate([-np.ones(self.structure.dims[0]), np.ones(self.structure.dims[1])])
        return self.matrix.conj().T @ (s[:, None] * self.matrix)

    def coordinates(self, psi):
        """``(c, excess)`` with ``psi ~ sum c_j e_j`` and the Euclidean remainder norm."""
        s = np.concatenate([-np.ones(self.structure.dims[0]), np.ones(self.structure.dims[1])])
        x = psi.array
        c = self.signs * (self.matrix.conj().T @ (s * x))
        excess = float(np.linalg.norm(x - self.matrix @ c))
        return c, excess


class HermiteSector:
    """Hermite functions on ``Y`` with total degree below ``cutoff``.

    ``x_i = (A_i + A_i^dagger)/sqrt(2)`` and ``d_i = (A_i - A_i^dagger)/sqrt(2)``
    act exactly on states of degree at most ``cutoff - 2``.
    """

    def __init__(self, dim_y, cutoff=8):
        if cutoff < 2:
            raise ConfigurationError("Hermite cutoff must be at least 2")
        self.dim_y = dim_y
        self.cutoff = cutoff
        self.states = occupation_states(dim_y, cutoff - 1)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.dim = len(self.states)
        self.degree = np.array([sum(s) for s in self.states])
        self.lower = [_ladder(self.states, self.index, i) for i in range(dim_y)]
        r2 = 1.0 / np.sqrt(2.0)
        self.x = [r2 * (a + a.T) for a in self.lower]
        self.d = [r2 * (a - a.T) for a in self.lower]

    @property
    def interior(self):
        return self.degree <= self.cutoff - 2


def build_fock(vectors, N=3, hermite_cutoff=8, dim_y=None):
    """Fock basis over ``vectors`` and the matching Hermite sector."""
    fb = FockBasis(vectors, N)
    dy = fb.structure.zero_dim if dim_y is None else dim_y
    return fb, HermiteSector(dy, hermite_cutoff)


class GBOperator:
    """Sparse operator on the truncated Gupta-Bleuler space."""

    def __init__(self, matrix, space, krein_symmetric=False):
        self.matrix = sp.csr_matrix(matrix)
        self.space = space
        self.krein_symmetric = krein_symmetric

    def dense(self):
        return self.matrix.toarray()

    def __matmul__(self, other):
        if isinstance(other, GBOperator):
            return GBOperator(self.matrix @ other.matrix, self.space)
        return self.matrix @ other

    def __add__(self, other):
        return GBOperator(self.matrix + other.matrix, self.space, self.krein_symmetric and other.krein_symmetric)

    def __sub__(self, other):
        return GBOperator(self.matrix - other.matrix, self.space, self.krein_symmetric and other.krein_symmetric)

    def __mul__(self, c):
        return GBOperator(c * self.matrix, self.space, self.krein_symmetric and np.isreal(c))

    __rmul__ = __mul__

    def commutator(self, other):
        return GBOperator(self.matrix @ other.matrix - other.matrix @ self.matrix, self.space)

    def krein_adjoint(self):
        J = self.space.J_diag
        return GBOperator(self.matrix.conj().T.multiply(J[:, None]).multiply(J[None, :]), self.space)

    def shifted(self, c):
        """``self - c * identity``."""
        return GBOperator(self.matrix - c * sp.identity(self.space.dim, format="csr"), self.space)

    def norm_bound(self, columns=None):
        """Upper bound ``sqrt(|X|_1 |X|_inf)`` on the spectral norm (optionally on a column subset)."""
        X = self.matrix if columns is None else self.matrix[:, np.flatnonzero(columns)]
        if X.nnz == 0:
            return 0.0
        a = abs(X)
        n1 = float(a.sum(axis=0).max())
        ninf = float(a.sum(axis=1).max())
        return float(np.sqrt(n1 * ninf))


def _pair_method(f):
    return "trapezoid" if isinstance(f, SampledForm) else "gauss"


class GBSpace:
    """Fock space tensored with the Hermite sector, with field operators.

    Parameters
    ----------
    structure : OneParticleStructure
    fock : FockBasis
    hermite : HermiteSector
    gauge : SpacetimeForm, optional
        Scalar gauge function ``Lambda``; ``None`` means ``Lambda = 0``.
    """

    def __init__(self, structure, fock, hermite, gauge=None):
        self.structure = structure
        self.fock = fock
        self.hermite = hermite
        self.gauge = gauge
        self._dgauge = st_exterior_derivative(gauge) if gauge is not None else None
        self.dim = fock.dim * hermite.dim
        self.J_diag = np.kron(fock.J, np.ones(hermite.dim))
        self._If = sp.identity(fock.dim, format="csr")
        self._Ih = sp.identity(hermite.dim, format="csr")
        self.vacuum = np.zeros(self.dim, complex)
        self.vacuum[0] = 1.0
        self.interior = np.kron(fock.particles <= fock.N - 1, hermite.interior).astype(bool)

    # one-particle operators --------------------------------------------------

    def _coords(self, psi):
        c, excess = self.fock.coordinates(psi)
        if excess > SPAN_TOL * max(1.0, psi.norm()):
            raise DomainError(f"vector leaves the Fock span (excess {excess:.3e})")
        return c

    def _fock_annihilate(self, c):
        M = sp.csr_matrix((self.fock.dim, self.fock.dim), dtype=complex)
        for j in range(self.fock.m):
            if c[j] != 0:
                M = M + np.conj(c[j]) * self.fock.signs[j] * self.fock.lower[j]
        return M

    def _fock_create(self, c):
        M = sp.csr_matrix((self.fock.dim, self.fock.dim), dtype=complex)
        for j in range(self.fock.m):
            if c[j] != 0:
                M = M + c[j] * self.fock.lower[j].T
        return M

    def annihilate(self, psi):
        return GBOperator(sp.kron(self._fock_annihilate(self._coords(psi)), self._Ih), self)

    def create(self, psi):
        return GBOperator(sp.kron(self._fock_create(self._coords(psi)), self._Ih), self)

    def zero_mode_operator(self, a, b):
        """``a . x + i b . grad`` on the Hermite sector."""
        H = sp.csr_matrix((self.hermite.dim, self.hermite.dim), dtype=complex)
        for i in range(self.hermite.dim_y):
            H = H + a[i] * self.hermite.x[i] + 1j * b[i] * self.hermite.d[i]
        return H

    # field operators ---------------------------------------------------------

    def field_data(self, f):
        """``(kappa(f), y-coordinates a, derivative direction b, gauge shift)``."""
        s = self.structure
        modes = _pj_modes(f, s)
        proj, k0, k1 = {}, s.kernel[0], s.kernel[1]
        for blk, q in (("t", 0), ("x", 1)):
            a, v = (m.copy() for m in modes[blk])
            a[s.kernel[q]] = 0.0
            v[s.kernel[q]] = 0.0
            proj[blk] = (a, v)
        kap = _tau_modes(s, proj)
        val = np.concatenate([modes["t"][0][k0], modes["x"][0][k1]])
        vel = np.concatenate([modes["t"][1][k0], modes["x"][1][k1]])
        a = vel
        b = -s.S * val
        shift = lorentz_pairing(self._dgauge, f, s.grid, method=_pair_method(f)) if self._dgauge is not None else 0.0
        return kap, a, b, shift

    def field_operator(self, f):
        """``A(f)`` on the truncated space."""
        kap, a, b, shift = self.field_data(f)
        psi = kap.conj()
        c, excess = self.fock.coordinates(psi)
        if excess > SPAN_TOL * max(1.0, psi.norm()):
            raise TruncationError(f"kappa(f) leaves the Fock span (excess {excess:.3e})")
        fock_part = (self._fock_annihilate(c) + self._fock_create(c)) / np.sqrt(2.0)
        M = sp.kron(fock_part, self._Ih) + sp.kron(self._If, self.zero_mode_operator(a, b))
        if shift != 0.0:
            M = M + shift * sp.identity(self.dim, format="csr")
        return GBOperator(M, self, krein_symmetric=True)

    def scalar(self, c):
        return GBOperator(c * sp.identity(self.dim, format="csr", dtype=complex), self)

    # states ------------------------------------------------------------------

    def krein_inner(self, u, v):
        return complex(np.vdot(u, self.J_diag * v))

    def apply_word(self, operators, vector=None):
        """``X_1 ... X_n v`` (rightmost acts first)."""
        v = self.vacuum if vector is None else vector
        for op in reversed(operators):
            v = op.matrix @ v
        return v

    def n_point(self, forms, operators=None):
        """Vacuum expectation ``<Omega, A(f_1) ... A(f_n) Omega>``."""
        ops = operators if operators is not None else [self.field_operator(f) for f in forms]
        return self.krein_inner(self.vacuum, self.apply_word(ops))

    def fundamental_symmetry(self):
        return sp.diags(self.J_diag)
