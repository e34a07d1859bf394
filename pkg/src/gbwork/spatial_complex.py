"""Flat-torus cochain complex with diagonal Hodge stars.

The spatial slice is a periodic rectangular lattice in one or two dimensions.
Cochains live on vertices, edges and faces; the exterior derivative is the
signed incidence matrix and the Hodge inner product on degree ``p`` is the
diagonal matrix ``mass[p]`` (dual volume over primal volume).  With these
conventions

    delta_p = mass[p-1]^{-1} d_{p-1}^T mass[p]
    Delta_p = d_{p-1} delta_p + delta_{p+1} d_p

and all of finite-dimensional Hodge theory is exact linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, InternalError, SingularityError

__all__ = [
    "SpatialComplex",
    "SpatialForm",
    "EigenBasis",
    "build_flat_torus",
    "exterior_derivative",
    "codifferential",
    "hodge_laplacian",
    "eigendecompose",
    "spectral_power",
    "project_harmonic",
    "project_perp",
]


@dataclass(frozen=True, eq=False)
class SpatialComplex:
    """Periodic lattice cochain complex.

    Attributes
    ----------
    dimension : int
        1 or 2.
    divisions : tuple of int
        Lattice cells per axis.
    edge_lengths : tuple of float
        Total length of each axis (cell size is ``length / divisions``).
    d : tuple of ndarray
        Integer incidence matrices ``d[0]`` (and ``d[1]`` in dimension 2).
    mass : tuple of ndarray
        Diagonals of the Hodge inner products, one per degree.
    kernel_rel_tol : float
        Relative kernel threshold used by :func:`eigendecompose`.
    """

    dimension: int
    divisions: tuple
    edge_lengths: tuple
    d: tuple
    mass: tuple
    kernel_rel_tol: float = 1e-8
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def cochain_dims(self):
        return tuple(m.size for m in self.mass)

    @property
    def top_degree(self):
        return self.dimension

    def spacing(self):
        return tuple(L / n for L, n in zip(self.edge_lengths, self.divisions))

    def inner(self, degree, a, b):
        """Hodge inner product ``<a, b>`` (conjugate-linear in ``a``)."""
        return np.conj(a) @ (self.mass[degree] * b)

    def derivative_matrix(self, degree):
        if degree < 0 or degree >= self.dimension:
            raise DomainError(f"no exterior derivative out of degree {degree}")
        return self.d[degree]

    def codiff_matrix(self, degree):
        """Dense matrix of ``delta`` acting on ``degree``-cochains."""
        if degree < 1 or degree > self.dimension:
            raise DomainError(f"no codifferential out of degree {degree}")
        key = ("codiff", degree)
        if key not in self._cache:
            dm = self.d[degree - 1].astype(float)
            self._cache[key] = (dm.T * self.mass[degree]) / self.mass[degree - 1][:, None]
        return self._cache[key]

    def laplacian_matrix(self, degree):
        """Dense matrix of the Hodge Laplacian on ``degree``-cochains."""
        key = ("lap", degree)
        if key not in self._cache:
            n = self.cochain_dims[degree]
            lap = np.zeros((n, n))
            if degree < self.dimension:
                lap += self.codiff_matrix(degree + 1) @ self.d[degree]
            if degree > 0:
                lap += self.d[degree - 1] @ self.codiff_matrix(degree)
            self._cache[key] = lap
        return self._cache[key]

    def eigenbasis(self, degree):
        """Cached :class:`EigenBasis` for ``degree``."""
        key = ("eig", degree)
        if key not in self._cache:
            self._cache[key] = eigendecompose(self, degree)
        return self._cache[key]


@dataclass(frozen=True, eq=False)
class SpatialForm:
    """Cochain of a fixed degree on a :class:`SpatialComplex`."""

    complex: SpatialComplex
    degree: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients)
        if c.ndim != 1 or c.size != self.complex.cochain_dims[self.degree]:
            raise DomainError(
                f"degree-{self.degree} form needs {self.complex.cochain_dims[self.degree]} "
                f"coefficients, got shape {c.shape}"
            )
        object.__setattr__(self, "coefficients", c)

    def _like(self, coeffs, degree=None):
        return SpatialForm(self.complex, self.degree if degree is None else degree, coeffs)

    def __add__(self, other):
        _check_same(self, other)
        return self._like(self.coefficients + other.coefficients)

    def __sub__(self, other):
        _check_same(self, other)
        return self._like(self.coefficients - other.coefficients)

    def __mul__(self, s):
        return self._like(s * self.coefficients)

    __rmul__ = __mul__

    def norm(self):
        return float(np.sqrt(abs(self.complex.inner(self.degree, self.coefficients, self.coefficients))))


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Spectral resolution of the Hodge Laplacian in one degree.

    Attributes
    ----------
    eigenvalues : ndarray
        Ascending, clipped at zero inside the kernel.
    vectors : ndarray
        Columns are mass-orthonormal eigenforms.
    kernel_indices : ndarray
        Indices whose eigenvalue is below ``kernel_tolerance``.
    """

    complex: SpatialComplex
    degree: int
    eigenvalues: np.ndarray
    vectors: np.ndarray
    kernel_indices: np.ndarray
    kernel_tolerance: float

    @property
    def perp_indices(self):
        mask = np.ones(self.eigenvalues.size, bool)
        mask[self.kernel_indices] = False
        return np.flatnonzero(mask)

    @property
    def eigenforms(self):
        return [SpatialForm(self.complex, self.degree, v) for v in self.vectors.T]

    def coefficients(self, cochains):
        """Mode coefficients of cochains stored along the last axis."""
        return np.asarray(cochains) @ (self.complex.mass[self.degree][:, None] * self.vectors)

    def synthesize(self, coeffs):
        """Inverse of :meth:`coefficients`."""
        return np.asarray(coeffs) @ self.vectors.T


def _check_same(a, b):
    if a.complex is not b.complex or a.degree != b.degree:
        raise DomainError("forms live on different complexes or degrees")


def _as_tuple(x, n, name):
    if np.isscalar(x):
        return (x,) * n
    x = tuple(x)
    if len(x) != n:
        raise ConfigurationError(f"{name} needs {n} entries, got {len(x)}")
    return x


def build_flat_torus(dimension, divisions, edge_lengths=1.0, kernel_rel_tol=1e-8):
    """Assemble the periodic lattice complex.

    Parameters
    ----------
    dimension : {1, 2}
    divisions : int or sequence of int
        Cells per axis, each at least 3.
    edge_lengths : float or sequence of float
        Axis lengths.

    Returns
    -------
    SpatialComplex
    """
    if dimension not in (1, 2):
        raise ConfigurationError(f"dimension must be 1 or 2, got {dimension}")
    divs = tuple(int(n) for n in _as_tuple(divisions, dimension, "divisions"))
    lens = tuple(float(L) for L in _as_tuple(edge_lengths, dimension, "edge_lengths"))
    if any(n < 3 for n in divs):
        raise ConfigurationError(f"divisions must be >= 3 on every axis, got {divs}")
    if any(not np.isfinite(L) or L <= 0 for L in lens):
        raise ConfigurationError(f"edge lengths must be positive, got {lens}")

    if dimension == 1:
        (n,), (h,) = divs, (lens[0] / divs[0],)
        d0 = np.zeros((n, n), dtype=np.int64)
        idx = np.arange(n)
        d0[idx, idx] = -1
        d0[idx, (idx + 1) % n] += 1
        mass = (np.full(n, h), np.full(n, 1.0 / h))
        return SpatialComplex(1, divs, lens, (d0,), mass, kernel_rel_tol)

    nx, ny = divs
    hx, hy = lens[0] / nx, lens[1] / ny
    nv = nx * ny
    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    i, j = i.ravel(), j.ravel()

    def vert(a, b):
        return (a % nx) + nx * (b % ny)

    ex = vert(i, j)
    ey = nv + vert(i, j)
    d0 = np.zeros((2 * nv, nv), dtype=np.int64)
    np.add.at(d0, (ex, vert(i, j)), -1)
    np.add.at(d0, (ex, vert(i + 1, j)), 1)
    np.add.at(d0, (ey, vert(i, j)), -1)
    np.add.at(d0, (ey, vert(i, j + 1)), 1)

    # counterclockwise boundary of the cell with lower-left corner (i, j)
    face = vert(i, j)
    d1 = np.zeros((nv, 2 * nv), dtype=np.int64)
    np.add.at(d1, (face, vert(i, j)), 1)
    np.add.at(d1, (face, nv + vert(i + 1, j)), 1)
    np.add.at(d1, (face, vert(i, j + 1)), -1)
    np.add.at(d1, (face, nv + vert(i, j)), -1)

    mass0 = np.full(nv, hx * hy)
    mass1 = np.concatenate([np.full(nv, hy / hx), np.full(nv, hx / hy)])
    mass2 = np.full(nv, 1.0 / (hx * hy))
    return SpatialComplex(2, divs, lens, (d0, d1), (mass0, mass1, mass2), kernel_rel_tol)


def exterior_derivative(form):
    """Apply ``d`` to a :class:`SpatialForm`."""
    cx = form.complex
    if form.degree >= cx.dimension:
        raise DomainError("exterior derivative of a top-degree form")
    return SpatialForm(cx, form.degree + 1, cx.d[form.degree] @ form.coefficients)


def codifferential(form):
    """Apply ``delta`` to a :class:`SpatialForm`."""
    cx = form.complex
    if form.degree == 0:
        raise DomainError("codifferential of a 0-form")
    return SpatialForm(cx, form.degree - 1, cx.codiff_matrix(form.degree) @ form.coefficients)


def hodge_laplacian(form):
    """Apply ``d delta + delta d``."""
    cx = form.complex
    return SpatialForm(cx, form.degree, cx.laplacian_matrix(form.degree) @ form.coefficients)


def eigendecompose(complex, degree):
    """Mass-orthonormal eigenbasis of the Hodge Laplacian.

    The generalized problem ``A v = lam M v`` with ``A = M Delta`` symmetric is
    reduced to a standard symmetric one by the diagonal scaling ``M^{1/2}``.

    Returns
    -------
    EigenBasis
    """
    if degree < 0 or degree > complex.dimension:
        raise DomainError(f"degree {degree} out of range")
    m = complex.mass[degree]
    sq = np.sqrt(m)
    lap = complex.laplacian_matrix(degree)
    sym = (sq[:, None] * lap) / sq[None, :]
    sym = 0.5 * (sym + sym.T)
    try:
        lam, y = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise InternalError(f"eigensolver failed in degree {degree}: {exc}") from exc
    if not np.all(np.isfinite(lam)):
        raise InternalError(f"non-finite eigenvalues in degree {degree}")
    tol = complex.kernel_rel_tol * max(lam.max(), 1e-300)
    kernel = np.flatnonzero(lam < tol)
    lam = lam.copy()
    lam[kernel] = 0.0
    vecs = y / sq[:, None]
    return EigenBasis(complex, degree, lam, vecs, kernel, tol)


def _basis_for(form, basis):
    if basis is None:
        return form.complex.eigenbasis(form.degree)
    if basis.degree != form.degree or basis.complex is not form.complex:
        raise DomainError("eigenbasis does not match form")
    return basis


def spectral_power(form, s, basis=None):
    """Apply ``Delta^s`` through the spectral resolution.

    Kernel modes pass through for ``s == 0`` and are annihilated for ``s > 0``.
    For ``s < 0`` the harmonic component must be negligible.
    """
    basis = _basis_for(form, basis)
    c = basis.coefficients(form.coefficients)
    ker = basis.kernel_indices
    out = np.zeros_like(c, dtype=np.result_type(c, float))
    perp = basis.perp_indices
    if s < 0:
        leak = np.abs(c[ker])
        if leak.size and np.sqrt(np.sum(leak**2)) > basis.kernel_tolerance:
            bad = [int(k) for k in ker[leak > basis.kernel_tolerance]] or [int(k) for k in ker]
            raise SingularityError(
                f"negative power {s} on data with harmonic component in modes {bad}"
            )
    if s == 0:
        out[:] = c
    else:
        out[perp] = basis.eigenvalues[perp] ** s * c[perp]
    return SpatialForm(form.complex, form.degree, basis.synthesize(out))


def project_harmonic(form, basis=None):
    """Mass-orthogonal projection onto the kernel of the Laplacian."""
    basis = _basis_for(form, basis)
    c = basis.coefficients(form.coefficients)
    keep = np.zeros_like(c)
    keep[basis.kernel_indices] = c[basis.kernel_indices]
    return SpatialForm(form.complex, form.degree, basis.synthesize(keep))


def project_perp(form, basis=None):
    """Projection onto the orthogonal complement of the harmonic forms."""
    return form - project_harmonic(form, basis)
