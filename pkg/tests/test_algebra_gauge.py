import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from gbwork.algebra_gauge import (
    AlgebraElement,
    FieldAlgebra,
    box_xi,
    box_xi_residual,
    gauge_shifts,
    gauge_transform,
    i_l,
    i_r,
    i_r_inverse,
    ideal_generator,
    is_observable,
    l_defect_check,
    normal_form,
    r_operator,
    represent,
    solve_box_xi,
)
from gbwork.corpus import ModeCorpus
from gbwork.errors import DomainError
from gbwork.fock_krein import GBSpace, build_fock
from gbwork.one_particle import OneParticleStructure
from gbwork.spacetime_forms import (
    CauchyData,
    SmoothBump,
    TimeGrid,
    make_test_form,
    st_box,
    st_codifferential,
    st_exterior_derivative,
)
from gbwork.spatial_complex import SpatialForm, build_flat_torus
from gbwork.wave_kernel import solve_cauchy

GRID = TimeGrid(3.0, 400)
CX = build_flat_torus(2, 6, 2 * np.pi)
S = OneParticleStructure(CX, GRID)
C = ModeCorpus(S, 1, 1)
N_GEN = 4


def _synthetic(seed):
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(N_GEN, N_GEN))
    G = G - G.T
    alg = FieldAlgebra(GRID)
    alg.set_commutators(G)
    return alg, G


def _sympy_apply(word, G):
    # A_i = x_i - (i/2) sum_k G_ik d/dx_k satisfies [A_i, A_j] = -i G_ij
    xs = sympy.symbols(f"x0:{N_GEN}")
    p = sympy.Integer(1)
    for i in reversed(word):
        p = sympy.expand(xs[i] * p - sympy.I / 2 * sum(G[i, k] * sympy.diff(p, xs[k]) for k in range(N_GEN)))
    return p, xs


def _max_coeff_diff(p, q, xs):
    d = sympy.Poly(sympy.expand(p - q), *xs)
    return max((abs(complex(c)) for c in d.coeffs()), default=0.0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), word=st.lists(st.integers(0, N_GEN - 1), max_size=5))
def test_normal_form_matches_differential_realization(seed, word):
    alg, G = _synthetic(seed)
    nf = normal_form(AlgebraElement(alg, {tuple(word): 1.0}))
    assert all(list(w) == sorted(w) for w in nf.terms)
    lhs, xs = _sympy_apply(word, G)
    rhs = sum((c * _sympy_apply(w, G)[0] for w, c in nf.terms.items()), sympy.Integer(0))
    assert _max_coeff_diff(lhs, rhs, xs) < 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), word=st.lists(st.integers(0, N_GEN - 1), max_size=6))
def test_normal_form_confluent_and_idempotent(seed, word):
    alg, _ = _synthetic(seed)
    e = AlgebraElement(alg, {tuple(word): 1.0 - 0.5j})
    a = normal_form(e, "leftmost")
    b = normal_form(e, "rightmost")
    c = normal_form(e, "random", np.random.default_rng(seed))
    assert a.distance(b) < 1e-10 and a.distance(c) < 1e-10
    assert normal_form(a).distance(a) == 0.0


def test_gauge_transform_is_multiplicative_and_composes():
    alg, _ = _synthetic(1)
    rng = np.random.default_rng(2)
    s1, s2 = rng.normal(size=N_GEN), rng.normal(size=N_GEN)
    g = [alg.generator(i) for i in range(N_GEN)]
    word = g[3] * g[0] * g[2]
    lhs = normal_form(gauge_transform(word, s1))
    rhs = normal_form(gauge_transform(g[3], s1) * gauge_transform(g[0], s1) * gauge_transform(g[2], s1))
    assert lhs.distance(rhs) < 1e-12
    twice = gauge_transform(gauge_transform(word, s1), s2)
    once = gauge_transform(word, s1 + s2)
    assert normal_form(twice).distance(normal_form(once)) < 1e-12


def test_gauge_shifts_are_linear_in_lambda():
    rng = np.random.default_rng(3)
    alg = FieldAlgebra(GRID)
    for _ in range(3):
        alg.add(C.generic_form(rng))
    l1, l2 = C.gauge_function(rng), C.gauge_function(rng)
    np.testing.assert_allclose(gauge_shifts(alg, l1) + gauge_shifts(alg, l2), gauge_shifts(alg, l1 + l2), atol=1e-10)
    assert np.all(gauge_shifts(alg, None) == 0)


def test_observables_and_ideal_in_representation():
    rng = np.random.default_rng(4)
    assert is_observable(C.coclosed_form(rng), GRID)
    assert not is_observable(C.exact_form(rng), GRID)
    fock, herm = build_fock(C.generators(), 2, 4)
    space = GBSpace(S, fock, herm, C.gauge_function(rng))
    alg = FieldAlgebra(GRID)
    gen = ideal_generator(alg, C.generic_form(rng), space.gauge)
    assert represent(gen, space).norm_bound() < 1e-4
    assert space.field_operator(C.coclosed_form(rng)).norm_bound() > 0.1


@pytest.mark.parametrize("mode", [1, 5])
def test_r_operator_matches_ode_oracle(mode):
    basis = CX.eigenbasis(0)
    lam = basis.eigenvalues[mode]
    prof = SmoothBump(0.2, 0.7)
    f = make_test_form(0, [(prof, SpatialForm(CX, 0, basis.vectors[:, mode]))])
    u = r_operator(f, t_initial=-1.0, grid=GRID)
    coef = basis.coefficients(u.jets["s"][0])[:, mode]
    start = GRID.t >= -1.0
    sol = solve_ivp(lambda t, y: [y[1], -lam * y[0] - prof(t)[0]], (-1.0, 3.0), [0.0, 0.0],
                    t_eval=GRID.t[start], rtol=1e-11, atol=1e-13, max_step=0.01)
    np.testing.assert_allclose(coef[start], sol.y[0], atol=1e-8)
    assert np.all(coef[~start] == 0)
    with pytest.raises(DomainError):
        r_operator(f, t_initial=0.0, grid=GRID)


def test_r_commutes_with_d():
    rng = np.random.default_rng(5)
    phi = C.scalar_form(rng)
    a = st_exterior_derivative(r_operator(phi, grid=GRID))
    b = r_operator(st_exterior_derivative(phi), grid=GRID)
    for k in a.jets:
        np.testing.assert_allclose(a.jets[k][0], b.jets[k][0], atol=1e-4)


def test_xi_one_is_identity_and_nonpositive_xi_rejected():
    rng = np.random.default_rng(6)
    psi = C.generic_form(rng)
    ref = psi.sample(GRID, 8)
    for op in (i_r, i_r_inverse, i_l):
        out = op(psi, 1.0, grid=GRID)
        for b in ref.jets:
            np.testing.assert_array_equal(out.jets[b], ref.jets[b])
    for xi in (0.0, -1.0):
        with pytest.raises(DomainError):
            i_r(psi, xi, grid=GRID)
        with pytest.raises(DomainError):
            box_xi(psi, xi)


@pytest.mark.parametrize("xi", [0.5, 2.0])
def test_box_of_jr_is_box_xi(xi):
    rng = np.random.default_rng(7)
    psi = C.generic_form(rng)
    lhs = st_box(i_r(psi, xi, GRID)).jets
    rhs = box_xi(psi, xi).jet(GRID.t, 0)
    for b in rhs:
        np.testing.assert_allclose(lhs[b][0], rhs[b][0], atol=1e-4)


def _random_data(rng):
    dims = {"t": CX.cochain_dims[0], "x": CX.cochain_dims[1]}
    return CauchyData(CX, 1, {b: rng.normal(size=n) for b, n in dims.items()},
                      {b: rng.normal(size=n) for b, n in dims.items()})


@pytest.mark.parametrize("xi", [0.5, 2.0])
def test_jr_inverse_coefficient(xi):
    rng = np.random.default_rng(8)
    sol = solve_box_xi(_random_data(rng), xi, GRID).form
    back = i_r(i_r_inverse(sol, xi, GRID), xi, GRID)
    err = max(np.abs(back.jets[b][0] - sol.jets[b][0]).max() for b in sol.jets)
    assert err < 1e-4
    # the coefficient (1 - xi) does not invert J_R since d R delta is idempotent
    dxd = st_exterior_derivative(r_operator(st_codifferential(sol), None, GRID))
    literal = i_r(sol + dxd * (1.0 - xi), xi, GRID)
    bad = max(np.abs(literal.jets[b][0] - sol.jets[b][0]).max() for b in sol.jets)
    assert bad > 1e3 * max(err, 1e-12)


def test_transverse_data_evolve_as_wave_equation():
    fr = CX.eigenbasis(2)
    val = CX.codiff_matrix(2) @ fr.vectors[:, 3]
    vel = CX.codiff_matrix(2) @ fr.vectors[:, 7]
    z0 = np.zeros(CX.cochain_dims[0])
    data = CauchyData(CX, 1, {"t": z0, "x": val}, {"t": z0.copy(), "x": vel})
    ref = solve_cauchy(data, t0=GRID.t[0]).jet(GRID.t, 0)
    for xi in (0.5, 2.0):
        sol = solve_box_xi(data, xi, GRID).form
        for b in ref:
            np.testing.assert_allclose(sol.jets[b][0], ref[b][0], atol=1e-8)


@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0])
def test_box_xi_solver_residual_and_order(xi):
    rng = np.random.default_rng(10)
    data = _random_data(rng)
    assert box_xi_residual(solve_box_xi(data, xi, GRID)) < 1e-5
    sols = [solve_box_xi(data, xi, GRID, substeps=s).form for s in (1, 2, 4)]

    def diff(a, b):
        return max(np.abs(a.jets[k][0] - b.jets[k][0]).max() for k in a.jets)

    ratio = diff(sols[0], sols[1]) / diff(sols[1], sols[2])
    assert abs(ratio / 16 - 1) <= 0.25


def test_l_defect_small():
    rng = np.random.default_rng(11)
    assert l_defect_check(C.generic_form(rng), grid=GRID) < 1e-4
