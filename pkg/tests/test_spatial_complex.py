import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbwork.errors import DomainError, SingularityError
from gbwork.spatial_complex import (
    SpatialForm,
    build_flat_torus,
    codifferential,
    exterior_derivative,
    hodge_laplacian,
    project_harmonic,
    project_perp,
    spectral_power,
)


def _fourier_eigenvalues(n, length):
    # lattice Laplacian symbol 4/h^2 sin^2(pi k / n)
    h = length / n
    return 4.0 / h**2 * np.sin(np.pi * np.arange(n) / n) ** 2


@pytest.mark.parametrize("n", [3, 4, 7, 8])
def test_1d_spectrum_matches_fourier_symbol(n):
    L = 2 * np.pi
    cx = build_flat_torus(1, n, L)
    ref = np.sort(_fourier_eigenvalues(n, L))
    for k in (0, 1):
        lam = cx.eigenbasis(k).eigenvalues
        np.testing.assert_allclose(lam, ref, atol=1e-10 * ref.max())


def test_unit_1d_spectrum_formula_not_literal_example():
    # unit length, four cells: symbol gives {0, 32, 64, 32}
    cx = build_flat_torus(1, 4, 1.0)
    lam = cx.eigenbasis(0).eigenvalues
    np.testing.assert_allclose(lam, [0, 32, 32, 64], atol=1e-10)


def test_2d_spectra_are_sums_of_axis_symbols():
    n, L = 6, 2 * np.pi
    cx = build_flat_torus(2, n, L)
    s = _fourier_eigenvalues(n, L)
    scalar = np.sort((s[:, None] + s[None, :]).ravel())
    np.testing.assert_allclose(cx.eigenbasis(0).eigenvalues, scalar, atol=1e-9)
    np.testing.assert_allclose(cx.eigenbasis(2).eigenvalues, scalar, atol=1e-9)
    np.testing.assert_allclose(cx.eigenbasis(1).eigenvalues, np.sort(np.r_[scalar, scalar]), atol=1e-9)


@pytest.mark.parametrize("dim,betti", [(1, [1, 1]), (2, [1, 2, 1])])
def test_betti_numbers(dim, betti):
    cx = build_flat_torus(dim, 5, 2 * np.pi)
    assert [cx.eigenbasis(k).kernel_indices.size for k in range(dim + 1)] == betti


def test_d_squared_exact():
    cx = build_flat_torus(2, 8, 2 * np.pi)
    assert np.abs(cx.d[1] @ cx.d[0]).max() == 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(3, 9), Lx=st.floats(0.5, 10), Ly=st.floats(0.5, 10))
def test_codifferential_is_adjoint(seed, n, Lx, Ly):
    rng = np.random.default_rng(seed)
    cx = build_flat_torus(2, n, (Lx, Ly))
    for k in (0, 1):
        a = SpatialForm(cx, k, rng.normal(size=cx.cochain_dims[k]))
        b = SpatialForm(cx, k + 1, rng.normal(size=cx.cochain_dims[k + 1]))
        lhs = cx.inner(k + 1, exterior_derivative(a).coefficients, b.coefficients)
        rhs = cx.inner(k, a.coefficients, codifferential(b).coefficients)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_eigenforms_are_mass_orthonormal_and_diagonalize():
    cx = build_flat_torus(2, 5, 2 * np.pi)
    b = cx.eigenbasis(1)
    V = b.vectors
    np.testing.assert_allclose(V.T @ (cx.mass[1][:, None] * V), np.eye(V.shape[1]), atol=1e-10)
    np.testing.assert_allclose(cx.laplacian_matrix(1) @ V, V * b.eigenvalues, atol=1e-9)


def test_spectral_power_and_projections():
    rng = np.random.default_rng(3)
    cx = build_flat_torus(2, 6, 2 * np.pi)
    f = SpatialForm(cx, 1, rng.normal(size=cx.cochain_dims[1]))
    p = project_perp(f)
    h = project_harmonic(f)
    np.testing.assert_allclose((p + h).coefficients, f.coefficients)
    assert hodge_laplacian(h).norm() < 1e-10
    half = spectral_power(p, 0.5)
    np.testing.assert_allclose(spectral_power(half, 0.5).coefficients, hodge_laplacian(p).coefficients, atol=1e-9)
    inv = spectral_power(p, -1)
    np.testing.assert_allclose(hodge_laplacian(inv).coefficients, p.coefficients, atol=1e-9)
    with pytest.raises(SingularityError):
        spectral_power(f, -1)


def test_shape_mismatch_raises():
    cx = build_flat_torus(2, 4)
    with pytest.raises(DomainError):
        SpatialForm(cx, 1, np.zeros(3))
