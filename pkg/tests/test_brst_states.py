import numpy as np
import pytest
from scipy.integrate import quad

from gbwork.brst_states import (
    NORMALIZATION,
    BrstPair,
    brst_compatibility_suite,
    green0,
    kappa0,
    kappa0_frequency_profile,
    scalar_inner,
)
from gbwork.corpus import ModeCorpus
from gbwork.errors import DomainError, SingularityError
from gbwork.fock_krein import GBSpace, build_fock
from gbwork.one_particle import OneParticleStructure
from gbwork.spacetime_forms import SmoothBump, TimeGrid, make_test_form, st_box
from gbwork.spatial_complex import SpatialForm, build_flat_torus

CX = build_flat_torus(2, 6, 2 * np.pi)
S = OneParticleStructure(CX, TimeGrid(3.0, 400))
C = ModeCorpus(S, 1, 1)
FOCK, HERM = build_fock(C.generators(), 2, 4)
PAIR = BrstPair(GBSpace(S, FOCK, HERM))


@pytest.mark.parametrize("mode", [1, 4, 9])
def test_kappa0_single_mode_quadrature_oracle(mode):
    basis = CX.eigenbasis(0)
    om = np.sqrt(basis.eigenvalues[mode])
    prof = SmoothBump(0.3, 0.8, 1.3)
    f = make_test_form(0, [(prof, SpatialForm(CX, 0, basis.vectors[:, mode]))])
    lo, hi = prof.support()
    # Pauli-Jordan solution at t = 0: value int sin(w s)/w b(s), velocity -int cos(w s) b(s)
    a = quad(lambda s: np.sin(om * s) / om * prof(s)[0], lo, hi, epsabs=1e-13, limit=200)[0]
    v = -quad(lambda s: np.cos(om * s) * prof(s)[0], lo, hi, epsabs=1e-13, limit=200)[0]
    k = kappa0(f, S)
    j = int(np.flatnonzero(S.perp[0] == mode)[0])
    assert k[j] == pytest.approx(om**0.5 * a + 1j * om**-0.5 * v, abs=1e-8)
    others = np.delete(k, j)
    assert np.abs(others).max() < 1e-10


def test_kappa0_rejects_constant_mode_and_wrong_degree():
    const = SpatialForm(CX, 0, np.ones(CX.cochain_dims[0]))
    f = make_test_form(0, [(SmoothBump(0.0, 0.8), const)])
    with pytest.raises(SingularityError):
        kappa0(f, S)
    with pytest.raises(DomainError):
        kappa0(C.generic_form(np.random.default_rng(0)), S)


def test_kappa0_box_and_imaginary_part():
    rng = np.random.default_rng(1)
    assert np.abs(kappa0(st_box(C.scalar_form(rng)), S)).max() < 1e-4
    for _ in range(3):
        f, g = C.scalar_form(rng), C.scalar_form(rng)
        assert abs(scalar_inner(kappa0(f, S), kappa0(g, S)).imag - green0(f, g, S)) < 1e-4
        assert PAIR.omega0(f, f).real >= 0


def test_scalar_two_point_positive_frequency():
    rng = np.random.default_rng(2)
    r = kappa0_frequency_profile(C.scalar_form(rng), C.scalar_form(rng), S)
    assert r["negative_mass_ratio"] <= 1e-6


def test_compatibility_conditions():
    res = brst_compatibility_suite(PAIR, C, np.random.default_rng(3), pairs=4)
    assert set(res) == {"omega1_box", "omega0_box", "omega1_antisymmetry", "omega0_antisymmetry",
                        "cross_relation", "omega1_positivity", "omega0_positivity", "classical_identity"}
    for k, v in res.items():
        assert v <= 1e-4, k


def test_omega1_closed_form_and_normalization_string():
    rng = np.random.default_rng(4)
    f, g = C.generic_form(rng, constant=True), C.generic_form(rng, constant=True)
    assert abs(PAIR.omega1(f, g) - PAIR.omega1_closed(f, g)) < 1e-10
    assert "omega0" in NORMALIZATION and "omega1" in NORMALIZATION


def test_pair_requires_gauge_free_space():
    space = GBSpace(S, FOCK, HERM, C.gauge_function(np.random.default_rng(5)))
    with pytest.raises(DomainError):
        BrstPair(space)
