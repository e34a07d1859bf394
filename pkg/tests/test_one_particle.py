import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbwork.corpus import ModeCorpus
from gbwork.errors import DomainError, SingularityError
from gbwork.one_particle import (
    KreinVector,
    OneParticleStructure,
    ZeroModeVector,
    complex_structure_J,
    dual_pairing,
    energy_apply,
    energy_form,
    evolve,
    frequency_profile,
    gz_form,
    harmonic_dual_form,
    harmonic_sigma,
    k_inner,
    kappa,
    krein_inner,
    positive_frequency_spectrum,
    tau,
    zero_mode,
)
from gbwork.spacetime_forms import CauchyData, TimeGrid, st_box
from gbwork.spatial_complex import build_flat_torus
from gbwork.wave_kernel import g_pairing, symplectic_sigma

CX = build_flat_torus(2, 6, 2 * np.pi)
S = OneParticleStructure(CX, TimeGrid(3.0, 400))
C = ModeCorpus(S, 2, 2)


def _krein(rng):
    n = sum(S.dims)
    return KreinVector.from_array(S, rng.normal(size=n) + 1j * rng.normal(size=n))


def _perp_data(rng):
    val, vel = {}, {}
    for b, q in (("t", 0), ("x", 1)):
        basis = S.bases[q]
        for store in (val, vel):
            c = rng.normal(size=basis.eigenvalues.size)
            c[S.kernel[q]] = 0.0
            store[b] = basis.synthesize(c)
    return CauchyData(CX, 1, val, vel)


def test_krein_product_signature():
    rng = np.random.default_rng(0)
    u, v = _krein(rng), _krein(rng)
    assert krein_inner(u, v) == pytest.approx(np.conj(krein_inner(v, u)))
    ref = np.vdot(u.array, u.signs * v.array)
    assert krein_inner(u, v) == pytest.approx(ref)
    e = S.zero()
    e.scalar[0] = 1.0
    assert krein_inner(e, e) == pytest.approx(-1.0)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_tau_intertwines_symplectic_form(seed):
    rng = np.random.default_rng(seed)
    d1, d2 = _perp_data(rng), _perp_data(rng)
    lhs = krein_inner(tau(d1, S), tau(d2, S)).imag
    rhs = symplectic_sigma(d1, d2)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_tau_rejects_harmonic_data():
    rng = np.random.default_rng(1)
    d = _perp_data(rng)
    d.value["x"] = d.value["x"] + CX.eigenbasis(1).vectors[:, S.kernel[1][0]]
    with pytest.raises(SingularityError):
        tau(d, S)


def test_kappa_annihilates_box_and_splits_g():
    rng = np.random.default_rng(2)
    f = C.generic_form(rng)
    assert kappa(st_box(f), S).norm() < 1e-4
    for _ in range(3):
        f, g = C.generic_form(rng, constant=True), C.generic_form(rng, constant=True)
        im = krein_inner(kappa(f, S), kappa(g, S)).imag
        gz = harmonic_sigma(zero_mode(f, S), zero_mode(g, S))
        assert abs(im + gz - g_pairing(f, g, S.grid)) < 1e-4
        assert abs(gz_form(f, g, S, method="gauss") - gz) < 1e-5


def test_coclosed_positive_exact_null():
    rng = np.random.default_rng(3)
    for _ in range(5):
        k = kappa(C.coclosed_form(rng), S)
        assert krein_inner(k, k).real >= -1e-8
        assert energy_form(C.coclosed_form(rng), S) >= -1e-8
        kd = kappa(C.exact_form(rng), S)
        assert abs(krein_inner(kd, kappa(C.coclosed_form(rng), S))) < 1e-5
        assert abs(krein_inner(kd, kappa(C.exact_form(rng), S))) < 1e-5


def test_evolution_preserves_krein_product_and_h_is_symmetric():
    rng = np.random.default_rng(4)
    u, v = _krein(rng), _krein(rng)
    assert krein_inner(evolve(u, 0.7), evolve(v, 0.7)) == pytest.approx(krein_inner(u, v))
    assert krein_inner(u, energy_apply(v)) == pytest.approx(krein_inner(energy_apply(u), v))
    h = 1e-5
    d = (evolve(u, h) - evolve(u, -h)) * (1 / (2 * h))
    np.testing.assert_allclose(d.array, (energy_apply(u) * 1j).array, atol=1e-6)


def test_zero_mode_structures():
    n = S.zero_dim
    basis = [ZeroModeVector(S, e[:n], e[n:]) for e in np.eye(2 * n)]
    K = np.array([[k_inner(a, b) for b in basis] for a in basis])
    np.testing.assert_allclose(K, np.eye(2 * n), atol=1e-12)
    Sg = np.array([[harmonic_sigma(a, b) for b in basis] for a in basis])
    np.testing.assert_allclose(Sg, -Sg.T, atol=1e-15)
    for z in basis:
        np.testing.assert_allclose(complex_structure_J(complex_structure_J(z)).array, -z.array, atol=1e-15)
        # K(z, z') = -sigma(z, J z')
        for w in basis:
            assert k_inner(z, w) == pytest.approx(-harmonic_sigma(z, complex_structure_J(w)), abs=1e-14)


def test_harmonic_dual_form_pairing():
    rng = np.random.default_rng(5)
    k0 = S.kernel[0].size
    vel = np.zeros(S.zero_dim)
    vel[k0:] = rng.normal(size=S.zero_dim - k0)
    y = ZeroModeVector(S, np.zeros(S.zero_dim), vel)
    F = harmonic_dual_form(y, S)
    for _ in range(3):
        f = C.generic_form(rng, constant=True)
        ref = harmonic_sigma(complex_structure_J(y), zero_mode(f, S))
        assert abs(dual_pairing(F, f, S) - ref) < 1e-5
    bad = ZeroModeVector(S, np.ones(S.zero_dim), vel)
    with pytest.raises(DomainError):
        harmonic_dual_form(bad, S)


def test_frequency_profile_separates_signs():
    omega = np.array([1.0, 2.5, 4.0])
    coef = np.array([0.3, 1.0, 0.5])
    pos = frequency_profile(coef, omega)
    neg = frequency_profile(coef, -omega[::-1])
    assert pos["negative_mass_ratio"] < 1e-10
    assert neg["negative_mass_ratio"] > 0.99
    peak = pos["frequencies"][np.argmax(pos["magnitudes"])]
    assert abs(peak - 2.5) < 0.5


def test_two_point_function_is_positive_frequency():
    rng = np.random.default_rng(6)
    f, g = C.generic_form(rng), C.generic_form(rng)
    r = positive_frequency_spectrum(f, g, S)
    assert r["negative_mass_ratio"] <= 1e-6
    i0 = int(np.flatnonzero(r["times"] == 0.0)[0])
    assert r["samples"][i0] == pytest.approx(krein_inner(kappa(f, S), kappa(g, S)), abs=1e-10)
