import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from gbwork.errors import DomainError
from gbwork.spacetime_forms import (
    CauchyData,
    SmoothBump,
    TimeGrid,
    cauchy_data,
    make_test_form,
    st_box,
    st_exterior_derivative,
)
from gbwork.spatial_complex import SpatialForm, build_flat_torus
from gbwork.wave_kernel import (
    cumulative_integral,
    g_pairing,
    green_advanced,
    green_retarded,
    pauli_jordan,
    solve_cauchy,
    symplectic_sigma,
    timeslice_reduce,
)

CX = build_flat_torus(2, 5, 2 * np.pi)
GRID = TimeGrid(3.0, 400)


def _rand(rng, q):
    return SpatialForm(CX, q, rng.normal(size=CX.cochain_dims[q]))


def _bump(rng):
    return SmoothBump(rng.uniform(-1.2, 1.2), rng.uniform(0.6, 1.0))


def _one_form(rng):
    return make_test_form(1, [(_bump(rng), _rand(rng, 0)), (_bump(rng), _rand(rng, 1))])


@pytest.mark.parametrize("mode", [0, 3, 11])
def test_retarded_mode_matches_ode_oracle(mode):
    basis = CX.eigenbasis(0)
    lam = basis.eigenvalues[mode]
    e = SpatialForm(CX, 0, basis.vectors[:, mode])
    prof = SmoothBump(-0.3, 0.8)
    f = make_test_form(0, [(prof, e)])
    u = green_retarded(f, GRID).jets["s"][0]
    coef = basis.coefficients(u)[:, mode]
    # u'' + lam u = -f, zero data in the far past
    sol = solve_ivp(lambda t, y: [y[1], -lam * y[0] - prof(t)[0]], (-3.0, 3.0), [0.0, 0.0],
                    t_eval=GRID.t, rtol=1e-11, atol=1e-13, max_step=0.01)
    np.testing.assert_allclose(coef, sol.y[0], atol=1e-8)
    adv = green_advanced(f, GRID).jets["s"][0]
    sol = solve_ivp(lambda t, y: [y[1], -lam * y[0] - prof(t)[0]], (3.0, -3.0), [0.0, 0.0],
                    t_eval=GRID.t[::-1], rtol=1e-11, atol=1e-13, max_step=0.01)
    np.testing.assert_allclose(basis.coefficients(adv)[:, mode], sol.y[0][::-1], atol=1e-8)


def test_green_operators_invert_box_with_causal_support():
    rng = np.random.default_rng(0)
    f = _one_form(rng)
    fj = f.jet(GRID.t, 0)
    lo, hi = f.support()
    for green, outside in ((green_retarded, GRID.t < lo), (green_advanced, GRID.t > hi)):
        u = green(f, GRID)
        r = st_box(u).jet(GRID.t, 0)
        for b in r:
            np.testing.assert_allclose(r[b][0], fj[b][0], atol=1e-6)
            assert np.abs(u.jets[b][0][outside]).max(initial=0.0) < 1e-10


def test_pauli_jordan_is_difference_and_homogeneous():
    rng = np.random.default_rng(1)
    f = _one_form(rng)
    diff = green_retarded(f, GRID) - green_advanced(f, GRID)
    G = pauli_jordan(f, GRID)
    ref = G.jet(GRID.t, 2)
    for b in ref:
        np.testing.assert_allclose(diff.jets[b][0], ref[b][0], atol=1e-6)
    r = st_box(G.sample(GRID, 2)).jet(GRID.t, 0)
    assert max(np.abs(a[0]).max() for a in r.values()) < 1e-8


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_bridge_identity_and_antisymmetry(seed):
    rng = np.random.default_rng(seed)
    f, g = _one_form(rng), _one_form(rng)
    G = g_pairing(f, g, GRID)
    sigma = symplectic_sigma(cauchy_data(pauli_jordan(f, GRID), 0.0), cauchy_data(pauli_jordan(g, GRID), 0.0))
    assert abs(G - sigma) <= 1e-4
    assert abs(G + g_pairing(g, f, GRID)) <= 1e-6 * max(1.0, abs(G))


def test_box_is_in_kernel_of_g():
    rng = np.random.default_rng(2)
    f, g = _one_form(rng), _one_form(rng)
    assert abs(g_pairing(st_box(f), g, GRID, method="gauss")) < 1e-6


def test_solve_cauchy_reproduces_data_and_is_homogeneous():
    rng = np.random.default_rng(3)
    val = {"t": rng.normal(size=CX.cochain_dims[0]), "x": rng.normal(size=CX.cochain_dims[1])}
    vel = {"t": rng.normal(size=CX.cochain_dims[0]), "x": rng.normal(size=CX.cochain_dims[1])}
    data = CauchyData(CX, 1, val, vel)
    u = solve_cauchy(data, t0=0.4)
    back = cauchy_data(u, 0.4)
    for b in val:
        np.testing.assert_allclose(back.value[b], val[b], atol=1e-12)
        np.testing.assert_allclose(back.velocity[b], vel[b], atol=1e-12)
    r = st_box(u.sample(GRID, 2)).jet(GRID.t, 0)
    assert max(np.abs(a[0]).max() for a in r.values()) < 1e-9
    with pytest.raises(DomainError):
        solve_cauchy(CauchyData(CX, 1, {"t": np.zeros(3), "x": val["x"]}, vel))


def test_symplectic_form_conserved_between_slices():
    rng = np.random.default_rng(4)
    f, g = _one_form(rng), _one_form(rng)
    Gf, Gg = pauli_jordan(f, GRID), pauli_jordan(g, GRID)
    s0 = symplectic_sigma(cauchy_data(Gf, -2.0), cauchy_data(Gg, -2.0))
    s1 = symplectic_sigma(cauchy_data(Gf, 2.5), cauchy_data(Gg, 2.5))
    assert abs(s0 - s1) < 1e-9 * max(1.0, abs(s0))


@pytest.mark.parametrize("method", ["spectral", "panel"])
def test_cumulative_integral_recovers_antiderivative(method):
    b = SmoothBump(0.2, 0.9)
    errs = []
    for n in (400, 800, 1600):
        grid = TimeGrid(3.0, n)
        jet = b.jet(grid.t, 1)
        errs.append(np.abs(cumulative_integral(jet[1], grid.dt, method=method) - jet[0]).max())
    assert errs[0] < 1e-5
    assert errs[2] < 1e-9
    assert errs[0] / errs[1] > 50 and errs[1] / errs[2] > 50


def test_panel_method_handles_nonvanishing_ends():
    t = GRID.t
    I = cumulative_integral(np.cos(t), GRID.dt, method="panel")
    np.testing.assert_allclose(I, np.sin(t) - np.sin(t[0]), atol=1e-10)


def test_timeslice_reduction():
    rng = np.random.default_rng(5)
    f, k = _one_form(rng), _one_form(rng)
    slab = (-0.5, 0.5)
    g, h = timeslice_reduce(f, slab, "plain", GRID)
    outside = (GRID.t < slab[0]) | (GRID.t > slab[1])
    assert max(np.abs(a[0][outside]).max() for a in g.jets.values()) < 1e-8
    assert abs(g_pairing(f, k, GRID) - g_pairing(g, k, GRID)) < 1e-6
    with pytest.raises(DomainError):
        timeslice_reduce(f, slab, "closed", GRID)
    with pytest.raises(DomainError):
        timeslice_reduce(f, (-3.5, 0.0), "plain", GRID)


def test_closed_variant_returns_exact_h():
    rng = np.random.default_rng(6)
    phi = make_test_form(0, [(_bump(rng), _rand(rng, 0))])
    f = st_exterior_derivative(phi)
    g, h = timeslice_reduce(f, (-0.5, 0.5), "closed", GRID)
    dh = st_exterior_derivative(h).jet(GRID.t, 0)
    assert max(np.abs(a[0]).max() for a in dh.values()) < 1e-6
