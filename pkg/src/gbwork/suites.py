"""Named verification suites.

Each check returns a scalar figure of merit compared against a tolerance
with a relation (``le``, ``ge`` or ``lt``).  Checks draw randomness only from
their own generator, seeded from ``(seed, check name)``, so the order and
process in which they run cannot change their results.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import WorkbenchError

__all__ = ["Check", "suite_checks", "run_check", "run_suite", "CONVENTIONS"]

CONVENTIONS = [
    "signature (+,-); Box = -d_t^2 - Delta on every block",
    "Green operators satisfy Box G_pm f = f; G = G_+ - G_-; G(f, g) = <G f, g>",
    "field operators use psi = conj(kappa f), giving [A(f), A(g)] = -i G(f, g)",
    "complex structure on Z: J(v, w) = (S w, -S v) so that K = L^2 inner product",
    "Y is the velocity slot of Z",
    "omega1 = conj<kappa f, kappa g>/2 + omega_Z; omega0 = conj<kappa0 f, kappa0 g>/2",
    "G0 = -(scalar Pauli-Jordan pairing), so G(f, dg) = -G0(delta f, g)",
    "inverse of J_R uses the coefficient (xi - 1)",
]


class Skip(Exception):
    """Raised by a check whose preconditions are not met."""


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    tolerance: float
    fn: object
    relation: str = "le"
    params: dict = field(default_factory=dict)


def _compare(value, tol, relation):
    if not math.isfinite(value) and relation != "ge":
        return False
    return {"le": value <= tol, "ge": value >= tol, "lt": value < tol}[relation]


# ---------------------------------------------------------------------------
# geometry


def _d_squared(m, rng):
    cx = m.complex
    if cx.dimension < 2:
        return 0.0
    return float(np.abs(cx.d[1] @ cx.d[0]).max())


def _hodge_adjointness(m, rng):
    cx = m.complex
    worst = 0.0
    for k in range(cx.dimension):
        codiff = cx.codiff_matrix(k + 1)
        for _ in range(5):
            a = rng.normal(size=cx.cochain_dims[k])
            b = rng.normal(size=cx.cochain_dims[k + 1])
            lhs, rhs = cx.inner(k + 1, cx.d[k] @ a, b), cx.inner(k, a, codiff @ b)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst


def _betti(m, rng):
    cx = m.complex
    return float(sum(abs(len(cx.eigenbasis(k).kernel_indices) - math.comb(cx.dimension, k))
                     for k in range(cx.dimension + 1)))


# ---------------------------------------------------------------------------
# propagation


def _generic(m, rng, **kw):
    return m.corpus.generic_form(rng, **kw)


def _bridge_errors(m, pairs, grid):
    from .spacetime_forms import cauchy_data
    from .wave_kernel import g_pairing, pauli_jordan, symplectic_sigma

    out = []
    for f, g in pairs:
        sigma = symplectic_sigma(cauchy_data(pauli_jordan(f, grid), 0.0), cauchy_data(pauli_jordan(g, grid), 0.0))
        out.append(abs(g_pairing(f, g, grid) - sigma))
    return np.array(out)


def _bridge(m, rng, n):
    pairs = [(_generic(m, rng, constant=True), _generic(m, rng, constant=True)) for _ in range(n)]
    return float(_bridge_errors(m, pairs, m.grid).max())


def _bridge_ratio(m, rng, n):
    pairs = [(_generic(m, rng, constant=True), _generic(m, rng, constant=True)) for _ in range(n)]
    coarse = _bridge_errors(m, pairs, m.grid).max()
    fine = _bridge_errors(m, pairs, m.grid.refined(2)).max()
    return float(coarse / fine) if fine > 0 else float("inf")


def _green_inverse(m, rng):
    from .spacetime_forms import st_box
    from .wave_kernel import green_advanced, green_retarded

    worst = 0.0
    for _ in range(3):
        f = _generic(m, rng, constant=True)
        fj = f.jet(m.grid.t, 0)
        for green in (green_retarded, green_advanced):
            r = st_box(green(f, m.grid)).jet(m.grid.t, 0)
            worst = max(worst, max(float(np.abs(r[b][0] - fj[b][0]).max()) for b in r))
    return worst


def _retarded_support(m, rng):
    from .wave_kernel import green_advanced, green_retarded

    worst = 0.0
    for _ in range(3):
        f = _generic(m, rng, constant=True)
        lo, hi = f.support()
        t = m.grid.t
        up = green_retarded(f, m.grid).jets
        dn = green_advanced(f, m.grid).jets
        for b in up:
            worst = max(worst, float(np.abs(up[b][0][t < lo]).max(initial=0.0)),
                        float(np.abs(dn[b][0][t > hi]).max(initial=0.0)))
    return worst


def _pj_difference(m, rng):
    from .wave_kernel import green_advanced, green_retarded, pauli_jordan

    f = _generic(m, rng, constant=True)
    diff = green_retarded(f, m.grid) - green_advanced(f, m.grid)
    ref = pauli_jordan(f, m.grid).jet(m.grid.t, 0)
    return max(float(np.abs(diff.jets[b][0] - ref[b][0]).max()) for b in ref)


def _st_adjointness(m, rng):
    from .spacetime_forms import lorentz_pairing, st_codifferential, st_exterior_derivative

    worst = 0.0
    for _ in range(3):
        phi, f = m.corpus.scalar_form(rng, mean_zero=False), _generic(m, rng, constant=True)
        lhs = lorentz_pairing(st_exterior_derivative(phi), f, m.grid, method="gauss")
        rhs = lorentz_pairing(phi, st_codifferential(f), m.grid, method="gauss")
        worst = max(worst, abs(lhs - rhs))
    return worst


def _timeslice(m, rng, slab=(-0.5, 0.5)):
    from .wave_kernel import g_pairing, timeslice_reduce

    worst = 0.0
    for _ in range(3):
        f, k = _generic(m, rng, constant=True), _generic(m, rng, constant=True)
        g, _ = timeslice_reduce(f, slab, "plain", m.grid)
        worst = max(worst, abs(g_pairing(f, k, m.grid) - g_pairing(g, k, m.grid)))
    return worst


# ---------------------------------------------------------------------------
# one-particle structure


def _kappa_box(m, rng):
    from .one_particle import kappa
    from .spacetime_forms import st_box

    return max(kappa(st_box(_generic(m, rng)), m.structure).norm() for _ in range(5))


def _coclosed_positivity(m, rng):
    from .one_particle import kappa, krein_inner

    vals = []
    for _ in range(10):
        k = kappa(m.corpus.coclosed_form(rng), m.structure)
        vals.append(krein_inner(k, k).real)
    return max(0.0, -min(vals))


def _vi_orthogonality(m, rng):
    from .one_particle import kappa, krein_inner

    s = m.structure
    worst = 0.0
    for _ in range(5):
        kd = kappa(m.corpus.exact_form(rng), s)
        for other in (m.corpus.coclosed_form(rng), m.corpus.exact_form(rng)):
            worst = max(worst, abs(krein_inner(kd, kappa(other, s))))
    return worst


def _gz_pairs(m, rng, n=5):
    from .one_particle import harmonic_sigma, kappa, krein_inner, zero_mode
    from .wave_kernel import g_pairing

    s = m.structure
    out = []
    for _ in range(n):
        f, g = _generic(m, rng, constant=True), _generic(m, rng, constant=True)
        im = krein_inner(kappa(f, s), kappa(g, s)).imag
        sz = harmonic_sigma(zero_mode(f, s), zero_mode(g, s))
        out.append((f, g, im, sz, g_pairing(f, g, s.grid)))
    return out


def _gz_decomposition(m, rng):
    return max(abs(im + sz - G) for _, _, im, sz, G in _gz_pairs(m, rng))


def _gz_harmonic(m, rng):
    from .one_particle import gz_form

    return max(abs(gz_form(f, g, m.structure) - sz) for f, g, _, sz, _ in _gz_pairs(m, rng))


def _energy_positivity(m, rng):
    from .one_particle import energy_form

    return max(0.0, -min(energy_form(m.corpus.coclosed_form(rng), m.structure) for _ in range(10)))


def _energy_indefinite(m, rng):
    from .one_particle import energy_form
    from .spacetime_forms import make_test_form
    from .spatial_complex import SpatialForm

    c = m.corpus
    f = make_test_form(1, [(c.profile(rng), SpatialForm(m.complex, 0, e)) for e in c.scalar])
    return energy_form(f, m.structure)


def _h_tau(m, rng):
    from .one_particle import energy_apply, tau_along
    from .wave_kernel import pauli_jordan

    s = m.structure
    h = 1e-4
    worst = 0.0
    for t0 in (0.0, 0.7):
        sol = pauli_jordan(_generic(m, rng), s.grid)

        def tv(t):
            return tau_along(sol, t, s)

        d = (tv(t0 - 2 * h) * (1 / 12) - tv(t0 - h) * (8 / 12) + tv(t0 + h) * (8 / 12)
             - tv(t0 + 2 * h) * (1 / 12)) * (1 / h)
        worst = max(worst, (energy_apply(tv(t0)) - d * 1j).norm())
    return worst


def _unit_zero_modes(s):
    n = s.zero_dim
    out = []
    for i in range(2 * n):
        e = np.zeros(2 * n)
        e[i] = 1.0
        from .one_particle import ZeroModeVector

        out.append(ZeroModeVector(s, e[:n], e[n:]))
    return out


def _k_equals_l2(m, rng):
    from .one_particle import k_inner

    basis = _unit_zero_modes(m.structure)
    K = np.array([[k_inner(a, b) for b in basis] for a in basis])
    return float(np.abs(K - np.eye(len(basis))).max())


def _j_squared(m, rng):
    from .one_particle import complex_structure_J

    return max(float(np.abs(complex_structure_J(complex_structure_J(z)).array + z.array).max())
               for z in _unit_zero_modes(m.structure))


def _random_y(m, rng):
    from .one_particle import ZeroModeVector

    s = m.structure
    k0 = s.kernel[0].size
    vel = np.zeros(s.zero_dim)
    vel[k0:] = rng.normal(size=s.zero_dim - k0)
    return ZeroModeVector(s, np.zeros(s.zero_dim), vel)


def _dual_pairing(m, rng, n):
    from .one_particle import complex_structure_J, dual_pairing, harmonic_dual_form, harmonic_sigma, zero_mode

    s = m.structure
    worst = 0.0
    for _ in range(n):
        y = _random_y(m, rng)
        F = harmonic_dual_form(y, s)
        f = _generic(m, rng, constant=True)
        worst = max(worst, abs(dual_pairing(F, f, s) - harmonic_sigma(complex_structure_J(y), zero_mode(f, s))))
    return worst


def _dual_closed(m, rng):
    from .one_particle import harmonic_dual_form
    from .spacetime_forms import st_exterior_derivative

    s = m.structure
    worst = 0.0
    for _ in range(5):
        F = harmonic_dual_form(_random_y(m, rng), s).sample(s.grid, 2)
        dF = st_exterior_derivative(F)
        worst = max(worst, max(float(np.abs(a).max(initial=0.0)) for a in dF.jets.values()))
    return worst


# ---------------------------------------------------------------------------
# frequency content


def _negative_frequency(m, rng, n):
    from .one_particle import positive_frequency_spectrum

    return max(positive_frequency_spectrum(_generic(m, rng), _generic(m, rng), m.structure)["negative_mass_ratio"]
               for _ in range(n))


def _spectrum_origin(m, rng):
    from .one_particle import kappa, krein_inner, positive_frequency_spectrum

    f, g = _generic(m, rng), _generic(m, rng)
    r = positive_frequency_spectrum(f, g, m.structure)
    ref = krein_inner(kappa(f, m.structure), kappa(g, m.structure))
    i0 = int(np.flatnonzero(r["times"] == 0.0)[0])
    return abs(r["samples"][i0] - ref)


# ---------------------------------------------------------------------------
# representation


def _need_particles(m, n):
    tr = m.config["truncation"]
    if tr["particles"] < (n + 1) // 2 or tr["hermite"] < (n + 1) // 2 + 1:
        raise Skip("truncation insufficient")


def _krein_gram(m, rng):
    fb = m.fock
    return float(np.abs(fb.gram() - np.diag(fb.signs)).max())


def _ccr(m, rng, n):
    from .wave_kernel import g_pairing

    sp = m.space
    worst = 0.0
    for _ in range(n):
        f, g = _generic(m, rng, constant=True), _generic(m, rng, constant=True)
        A, B = sp.field_operator(f), sp.field_operator(g)
        G = g_pairing(f, g, m.grid, method="gauss")
        worst = max(worst, A.commutator(B).shifted(-1j * G).norm_bound(sp.interior))
    return worst


def _zero_mode_ccr(m, rng, n):
    from .one_particle import gz_form

    sp, hs = m.space, m.hermite
    eye = np.eye(hs.dim)[:, hs.interior]
    worst = 0.0
    for _ in range(n):
        f, g = _generic(m, rng, constant=True), _generic(m, rng, constant=True)
        _, af, bf, _ = sp.field_data(f)
        _, ag, bg, _ = sp.field_data(g)
        Zf, Zg = sp.zero_mode_operator(af, bf), sp.zero_mode_operator(ag, bg)
        c = (Zf @ Zg - Zg @ Zf).toarray()[:, hs.interior] + 1j * gz_form(f, g, m.structure, "gauss") * eye
        worst = max(worst, float(np.abs(c).max()))
    return worst


def _krein_symmetry(m, rng):
    sp = m.space
    return max((sp.field_operator(f).krein_adjoint() - sp.field_operator(f)).norm_bound()
               for f in (_generic(m, rng, constant=True) for _ in range(3)))


def _ideal_annihilation(m, rng, n):
    from .algebra_gauge import FieldAlgebra, ideal_generator, represent

    alg = FieldAlgebra(m.grid)
    return max(represent(ideal_generator(alg, _generic(m, rng), m.gauge), m.space).norm_bound() for _ in range(n))


def _gb_condition(m, rng):
    from .spacetime_forms import lorentz_pairing, st_box, st_exterior_derivative

    _need_particles(m, 4)
    sp = m.space
    worst = 0.0
    for _ in range(3):
        phi0 = sp.apply_word([sp.field_operator(m.corpus.coclosed_form(rng)),
                              sp.field_operator(m.corpus.coclosed_form(rng))])
        sc = m.corpus.scalar_form(rng)
        shift = lorentz_pairing(m.gauge, st_box(sc), m.grid, method="gauss") if m.gauge is not None else 0.0
        X = sp.field_operator(st_exterior_derivative(sc)).shifted(shift)
        worst = max(worst, abs(sp.krein_inner(phi0, X @ phi0)), abs(sp.krein_inner(phi0, X @ (X @ phi0))))
    return worst


def _observable_gram(m, rng):
    sp = m.free_space
    ops = [sp.field_operator(m.corpus.coclosed_form(rng)) for _ in range(4)]
    vecs = [sp.apply_word([A]) for A in ops]
    if m.config["truncation"]["particles"] >= 2:
        vecs += [sp.apply_word([A, B]) for A in ops for B in ops]
    vecs.append(sp.vacuum)
    M = np.array([[sp.krein_inner(u, v) for v in vecs] for u in vecs])
    M = 0.5 * (M + M.conj().T)
    return max(0.0, -float(np.linalg.eigvalsh(M).min()))


def _two_point(m, rng, n):
    from .wave_kernel import g_pairing

    _need_particles(m, 2)
    sp = m.free_space
    worst = 0.0
    for _ in range(n):
        f, g = _generic(m, rng, constant=True), _generic(m, rng, constant=True)
        A, B = sp.field_operator(f), sp.field_operator(g)
        w = sp.n_point(None, [A, B]) - sp.n_point(None, [B, A])
        worst = max(worst, abs(w + 1j * g_pairing(f, g, m.grid, method="gauss")))
    return worst


def _odd_npoint(m, rng):
    sp = m.free_space
    A = sp.field_operator(_generic(m, rng, constant=True))
    B = sp.field_operator(_generic(m, rng, constant=True))
    return max(abs(sp.n_point(None, [A])), abs(sp.n_point(None, [A, B, A])))


def _wick(m, rng):
    _need_particles(m, 4)
    sp = m.free_space
    worst = 0.0
    for _ in range(3):
        A = sp.field_operator(_generic(m, rng, constant=True))
        B = sp.field_operator(_generic(m, rng, constant=True))

        def w2(X, Y):
            return sp.n_point(None, [X, Y])

        w4 = sp.n_point(None, [A, A, B, B])
        worst = max(worst, abs(w4 - (w2(A, A) * w2(B, B) + 2 * w2(A, B) ** 2)))
    return worst


# ---------------------------------------------------------------------------
# algebra


def _algebra_with(m, rng, k):
    from .algebra_gauge import FieldAlgebra

    alg = FieldAlgebra(m.grid)
    for _ in range(k):
        alg.add(_generic(m, rng))
    return alg


def _normal_form_corpus(m, rng, n):
    from .algebra_gauge import AlgebraElement, normal_form

    alg = _algebra_with(m, rng, 5)
    worst = 0.0
    for _ in range(n):
        L = int(rng.integers(0, 6))
        w = tuple(int(i) for i in rng.integers(0, 5, size=L))
        e = AlgebraElement(alg, {w: complex(rng.normal(), rng.normal())})
        a = normal_form(e, "leftmost")
        b = normal_form(e, "rightmost")
        c = normal_form(e, "random", rng)
        worst = max(worst, a.distance(b), a.distance(c), normal_form(a).distance(a))
    return worst


def _normal_form_representation(m, rng):
    from .algebra_gauge import AlgebraElement, normal_form

    _need_particles(m, 6)
    sp = m.free_space
    alg = _algebra_with(m, rng, 4)
    ops = {i: sp.field_operator(f) for i, f in enumerate(alg.forms)}
    worst = 0.0
    for _ in range(10):
        w = tuple(int(i) for i in rng.integers(0, 4, size=3))
        direct = sp.apply_word([ops[i] for i in w])
        nf = normal_form(AlgebraElement(alg, {w: 1.0}))
        vec = sum(c * sp.apply_word([ops[i] for i in word]) for word, c in nf.terms.items())
        worst = max(worst, float(np.abs(direct - vec).max()))
    return worst


def _gauge_pair(m, rng):
    return m.corpus.gauge_function(rng), m.corpus.gauge_function(rng)


def _gauge_homomorphism(m, rng):
    from .algebra_gauge import gauge_shifts, gauge_transform, normal_form

    alg = _algebra_with(m, rng, 3)
    lam, _ = _gauge_pair(m, rng)
    s = gauge_shifts(alg, lam)
    g = [alg.generator(i) for i in range(3)]
    lhs = normal_form(gauge_transform(g[0] * g[2] * g[1], s))
    rhs = normal_form(gauge_transform(g[0], s) * gauge_transform(g[2], s) * gauge_transform(g[1], s))
    return lhs.distance(rhs)


def _gauge_composition(m, rng):
    from .algebra_gauge import gauge_shifts

    alg = _algebra_with(m, rng, 5)
    l1, l2 = _gauge_pair(m, rng)
    return float(np.abs(gauge_shifts(alg, l1) + gauge_shifts(alg, l2) - gauge_shifts(alg, l1 + l2)).max())


def _idtrans(m, rng):
    from .algebra_gauge import AlgebraElement, FieldAlgebra, gauge_shifts, gauge_transform, ideal_generator

    l1, l2 = _gauge_pair(m, rng)
    worst = 0.0
    for _ in range(3):
        alg = FieldAlgebra(m.grid)
        f = _generic(m, rng)
        gen = ideal_generator(alg, f, l1)
        moved = gauge_transform(gen, gauge_shifts(alg, l2))
        target = ideal_generator(alg, f, l1 + l2)
        target = AlgebraElement(alg, {((0,) if w else w): c for w, c in target.terms.items()})
        worst = max(worst, moved.distance(target))
    return worst


def _timeslice_representation(m, rng, slab=(-0.5, 0.5)):
    from .wave_kernel import timeslice_reduce

    sp = m.free_space
    worst = 0.0
    for _ in range(3):
        f = _generic(m, rng)
        g, _ = timeslice_reduce(f, slab, "plain", m.grid)
        worst = max(worst, (sp.field_operator(f) - sp.field_operator(g)).norm_bound())
    return worst


def _observable_detection(m, rng):
    from .algebra_gauge import is_observable

    wrong = 0
    for _ in range(5):
        wrong += not is_observable(m.corpus.coclosed_form(rng), m.grid)
        wrong += is_observable(m.corpus.exact_form(rng), m.grid)
    return float(wrong)


def _separation(m, rng, n):
    from .algebra_gauge import observable_ideal_separation

    space = m.space
    if space.gauge is None:
        from .fock_krein import GBSpace

        space = GBSpace(m.structure, m.fock, m.hermite, m.corpus.gauge_function(rng))
    return observable_ideal_separation(space, m.corpus, rng, n)["ratio"]


# ---------------------------------------------------------------------------
# gauge parameter


def _xi_identity(m, rng, xi):
    from .algebra_gauge import i_l, i_r, i_r_inverse

    psi = _generic(m, rng)
    ref = psi.sample(m.grid, 8)
    worst = 0.0
    for op in (i_r, i_r_inverse, i_l):
        out = op(psi, xi, grid=m.grid)
        worst = max(worst, max(float(np.abs(out.jets[b] - ref.jets[b]).max()) for b in ref.jets))
    return worst


def _box_jr(m, rng, xi):
    from .algebra_gauge import box_xi, i_r
    from .spacetime_forms import st_box

    worst = 0.0
    for _ in range(3):
        psi = _generic(m, rng)
        lhs = st_box(i_r(psi, xi, m.grid)).jets
        rhs = box_xi(psi, xi).jet(m.grid.t, 0)
        worst = max(worst, max(float(np.abs(lhs[b][0] - rhs[b][0]).max()) for b in rhs))
    return worst


def _box_xi_data(m, rng):
    from .spacetime_forms import CauchyData

    cx = m.complex
    dims = {"t": cx.cochain_dims[0], "x": cx.cochain_dims[1]}
    return CauchyData(cx, 1, {b: rng.normal(size=n) for b, n in dims.items()},
                      {b: rng.normal(size=n) for b, n in dims.items()})


def _jr_inverse(m, rng, xi):
    from .algebra_gauge import i_r, i_r_inverse, solve_box_xi

    sol = solve_box_xi(_box_xi_data(m, rng), xi, m.grid).form
    back = i_r(i_r_inverse(sol, xi, m.grid), xi, m.grid)
    return max(float(np.abs(back.jets[b][0] - sol.jets[b][0]).max()) for b in sol.jets)


def _modified_commutator(m, rng, xi):
    from .algebra_gauge import i_l
    from .wave_kernel import g_pairing

    sp = m.free_space
    worst = 0.0
    for _ in range(2):
        a, b = i_l(_generic(m, rng), xi, grid=m.grid), i_l(_generic(m, rng), xi, grid=m.grid)
        A, B = sp.field_operator(a), sp.field_operator(b)
        worst = max(worst, A.commutator(B).shifted(-1j * g_pairing(a, b, m.grid)).norm_bound(sp.interior))
    return worst


def _box_xi_residual(m, rng, xi):
    from .algebra_gauge import box_xi_residual, solve_box_xi

    return box_xi_residual(solve_box_xi(_box_xi_data(m, rng), xi, m.grid))


def _self_convergence(m, rng, xi):
    from .algebra_gauge import solve_box_xi

    data = _box_xi_data(m, rng)
    sols = [solve_box_xi(data, xi, m.grid, substeps=s).form for s in (1, 2, 4)]

    def diff(a, b):
        return max(float(np.abs(a.jets[k][0] - b.jets[k][0]).max()) for k in a.jets)

    ratio = diff(sols[0], sols[1]) / diff(sols[1], sols[2])
    return abs(ratio / 16.0 - 1.0)


def _l_defect(m, rng):
    from .algebra_gauge import l_defect_check

    return max(l_defect_check(_generic(m, rng), grid=m.grid) for _ in range(3))


def _r_commutes(m, rng):
    from .algebra_gauge import r_operator
    from .spacetime_forms import st_exterior_derivative

    phi = m.corpus.scalar_form(rng)
    a = st_exterior_derivative(r_operator(phi, grid=m.grid))
    b = r_operator(st_exterior_derivative(phi), grid=m.grid)
    return max(float(np.abs(a.jets[k][0] - b.jets[k][0]).max()) for k in a.jets)


# ---------------------------------------------------------------------------
# BRST pair


def _brst_residuals(m, n):
    from .brst_states import brst_compatibility_suite

    key = ("brst", n)
    cache = m.__dict__.setdefault("_suite_cache", {})
    if key not in cache:
        cache[key] = brst_compatibility_suite(m.brst, m.corpus, m.rng("brst-compatibility"), n)
    return cache[key]


def _brst_entry(entry):
    def fn(m, rng, n):
        return _brst_residuals(m, n)[entry]

    return fn


def _cross_relation(m, rng, n):
    from .spacetime_forms import st_codifferential, st_exterior_derivative

    P = m.brst
    worst = 0.0
    for _ in range(n):
        f, g = _generic(m, rng), m.corpus.scalar_form(rng)
        worst = max(worst, abs(P.omega0(st_codifferential(f), g) + P.omega1(f, st_exterior_derivative(g))))
    return worst


def _kappa0_box(m, rng):
    from .brst_states import kappa0
    from .spacetime_forms import st_box

    return max(float(np.abs(kappa0(st_box(m.corpus.scalar_form(rng)), m.structure)).max()) for _ in range(5))


def _kappa0_im(m, rng):
    from .brst_states import green0, kappa0, scalar_inner

    s = m.structure
    worst = 0.0
    for _ in range(5):
        f, g = m.corpus.scalar_form(rng), m.corpus.scalar_form(rng)
        worst = max(worst, abs(scalar_inner(kappa0(f, s), kappa0(g, s)).imag - green0(f, g, s)))
    return worst


def _kappa0_frequency(m, rng):
    from .brst_states import kappa0_frequency_profile

    return max(kappa0_frequency_profile(m.corpus.scalar_form(rng), m.corpus.scalar_form(rng),
                                        m.structure)["negative_mass_ratio"] for _ in range(10))


def _omega1_closed(m, rng):
    P = m.brst
    worst = 0.0
    for _ in range(3):
        f, g = _generic(m, rng, constant=True), _generic(m, rng, constant=True)
        worst = max(worst, abs(P.omega1(f, g) - P.omega1_closed(f, g)))
    return worst


# ---------------------------------------------------------------------------
# registry


def suite_checks(name, config):
    """Checks of suite ``name`` for ``config`` (the gauge_param suite expands over xi)."""
    S = config["samples"]
    if name == "geometry":
        return [
            Check("d_squared", "d o d = 0", 0.0, _d_squared),
            Check("hodge_adjointness", "<d a, b> = <a, delta b>", 1e-12, _hodge_adjointness),
            Check("betti_numbers", "dim ker Delta^k = binom(n, k) on the torus", 0.0, _betti),
        ]
    if name == "propagation":
        return [
            Check("bridge_identity", "G(f, g) = sigma(Psi_0^{Gf}, Psi_0^{Gg})", 1e-4, _bridge,
                  params={"n": S["bridge_pairs"]}),
            Check("bridge_convergence", "bridge error ratio under time-sample doubling", 4.0, _bridge_ratio,
                  "ge", {"n": min(S["bridge_pairs"], 20)}),
            Check("green_inverse", "Box G_pm f = f", 1e-6, _green_inverse),
            Check("green_support", "G_+ f = 0 before supp f, G_- f = 0 after", 1e-10, _retarded_support),
            Check("pauli_jordan_difference", "G = G_+ - G_-", 1e-6, _pj_difference),
            Check("spacetime_adjointness", "<d phi, f> = <phi, delta f>", 1e-8, _st_adjointness),
            Check("timeslice_reduction", "G(f - g, k) = 0 for the slab-supported g", 1e-6, _timeslice),
        ]
    if name == "one_particle":
        return [
            Check("kappa_box", "kappa(Box f) = 0", 1e-4, _kappa_box),
            Check("coclosed_positivity", "<kappa f, kappa f> >= 0 for delta f = 0", 1e-8, _coclosed_positivity),
            Check("exact_orthogonality", "<kappa(d phi), kappa(f)> = 0 for co-closed or exact f", 1e-5,
                  _vi_orthogonality),
            Check("gz_decomposition", "Im<kappa f, kappa g> + G_Z(f, g) = G(f, g)", 1e-4, _gz_decomposition),
            Check("gz_harmonic_sigma", "G_Z equals the harmonic-block symplectic form", 1e-5, _gz_harmonic),
            Check("energy_positivity", "<kappa f, H kappa f> >= 0 for delta f = 0", 1e-8, _energy_positivity),
            Check("energy_indefinite", "<kappa f, H kappa f> < 0 for some generic f", 0.0, _energy_indefinite, "lt"),
            Check("h_tau", "H tau = i d_t tau", 1e-6, _h_tau),
            Check("k_equals_l2", "K = L^2 inner product on Z", 1e-10, _k_equals_l2),
            Check("j_squared", "J^2 = -1", 1e-14, _j_squared),
            Check("harmonic_dual_pairing", "<F_y, f> = G_Z(J y, f)", 1e-5, _dual_pairing,
                  params={"n": S["dual_forms"]}),
            Check("harmonic_dual_closed", "d F_y = 0", 1e-10, _dual_closed),
        ]
    if name == "frequency":
        return [
            Check("negative_frequency_ratio", "t -> <kappa f, exp(iHt) kappa g> has positive frequencies",
                  1e-6, _negative_frequency, params={"n": S["frequency_pairs"]}),
            Check("spectrum_origin", "F(0) = <kappa f, kappa g>", 1e-10, _spectrum_origin),
        ]
    if name == "fock":
        npoint = set(config["fock"]["npoint"])
        out = [
            Check("krein_gram", "Krein Gram of the Fock basis is diag(+-1)", 1e-10, _krein_gram),
            Check("ccr_interior", "[A(f), A(g)] = -i G(f, g) on interior sectors", 1e-6, _ccr,
                  params={"n": S["pairs"]}),
            Check("zero_mode_ccr", "[A_Z(f), A_Z(g)] = -i G_Z(f, g)", 1e-8, _zero_mode_ccr,
                  params={"n": S["pairs"]}),
            Check("krein_symmetry", "A(f) is Krein-symmetric", 1e-12, _krein_symmetry),
            Check("ideal_annihilation", "pi(A(Box f) - Lambda(delta Box f)) = 0", 1e-4, _ideal_annihilation,
                  params={"n": S["pairs"]}),
            Check("gb_condition", "(A(d phi) - Lambda(Box phi)) annihilates physical expectation values", 1e-5,
                  _gb_condition),
            Check("observable_gram_psd", "observable Gram matrix is positive semidefinite", 1e-8,
                  _observable_gram),
            Check("odd_npoint", "odd vacuum expectation values vanish", 1e-12, _odd_npoint),
        ]
        if 2 in npoint:
            out.append(Check("two_point_antisymmetry", "w(f, g) - w(g, f) = -i G(f, g)", 1e-6, _two_point,
                             params={"n": S["pairs"]}))
        if 4 in npoint:
            out.append(Check("wick_four_point", "w4 = sum over pairings of w2 w2", 1e-8, _wick))
        return out
    if name == "algebra":
        return [
            Check("normal_form_confluence", "normal form independent of rewriting order; idempotent", 1e-10,
                  _normal_form_corpus, params={"n": S["words"]}),
            Check("normal_form_representation", "normal form agrees with operator products", 1e-6,
                  _normal_form_representation),
            Check("gauge_homomorphism", "gauge map is multiplicative", 1e-12, _gauge_homomorphism),
            Check("gauge_composition", "shift(Lambda) + shift(Lambda') = shift(Lambda + Lambda')", 1e-10,
                  _gauge_composition),
            Check("ideal_transport", "gauge map sends I_Lambda to I_{Lambda + Lambda'}", 1e-6, _idtrans),
            Check("timeslice_representation", "pi(A(f)) = pi(A(g)) for the slab-supported g", 1e-4,
                  _timeslice_representation),
            Check("observable_detection", "delta f = 0 detected exactly", 0.0, _observable_detection),
            Check("observable_ideal_separation", "observables faithful, ideal annihilated", 1e3, _separation,
                  "ge", {"n": S["separation"]}),
        ]
    if name == "gauge_param":
        out = [
            Check("l_defect", "G(f - L Box f) = 0", 1e-4, _l_defect),
            Check("r_commutes_with_d", "d R phi = R d phi", 1e-4, _r_commutes),
        ]
        for xi in config["xi"]:
            tag = f"[xi={xi:g}]"
            p = {"xi": float(xi)}
            if xi == 1:
                out.append(Check("identity" + tag, "all gauge-parameter maps are the identity at xi = 1", 0.0,
                                 _xi_identity, params=p))
            out += [
                Check("box_jr" + tag, "Box J_R psi = Box_xi psi", 1e-4, _box_jr, params=p),
                Check("jr_inverse" + tag, "J_R J_R^{-1} = 1 on Box_xi solutions", 1e-4, _jr_inverse, params=p),
                Check("modified_commutator" + tag, "[A(J_L f), A(J_L g)] = -i G(J_L f, J_L g)", 1e-6,
                      _modified_commutator, params=p),
                Check("box_xi_residual" + tag, "Box_xi u = 0 for the integrated solution", 1e-5,
                      _box_xi_residual, params=p),
                Check("self_convergence" + tag, "|ratio/16 - 1| under step halving", 0.25, _self_convergence,
                      params=p),
            ]
        return out
    if name == "brst":
        n = S["brst_pairs"]
        entries = [
            ("omega1_box", "omega1(Box f, g) = omega1(f, Box g) = 0", 1e-4),
            ("omega0_box", "omega0(Box f, g) = omega0(f, Box g) = 0", 1e-4),
            ("omega1_antisymmetry", "omega1(f, g) - omega1(g, f) = -i G(f, g)", 1e-4),
            ("omega0_antisymmetry", "omega0(f, g) - omega0(g, f) = -i G0(f, g)", 1e-4),
            ("cross_relation", "omega0(delta f, g) = -omega1(f, d g)", 1e-4),
            ("omega1_positivity", "omega1(f, f) >= 0 for delta f = 0", 1e-8),
            ("omega0_positivity", "omega0(f, f) >= 0", 1e-8),
            ("classical_identity", "G(f, d g) = -G0(delta f, g)", 1e-4),
        ]
        out = [Check(k, a, t, _brst_entry(k), params={"n": n}) for k, a, t in entries]
        out += [
            Check("cross_relation_sweep", "omega0(delta f, g) = -omega1(f, d g)", 1e-4, _cross_relation,
                  params={"n": S["cross_pairs"]}),
            Check("kappa0_box", "kappa0(Box f) = 0", 1e-4, _kappa0_box),
            Check("kappa0_imaginary_part", "Im<kappa0 f, kappa0 g> = G0(f, g)", 1e-4, _kappa0_im),
            Check("kappa0_frequency", "scalar two-point function has positive frequencies", 1e-6,
                  _kappa0_frequency),
            Check("omega1_closed_form", "representation and closed form of omega1 agree", 1e-10, _omega1_closed),
        ]
        return out
    raise KeyError(name)




def _clean(x):
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else ("-inf" if x < 0 else "nan"))


def run_check(model, suite, check, tolerances=None, timings=False):
    """Evaluate one check into a report record."""
    tol = (tolerances or {}).get(check.name, check.tolerance)
    rec = {"suite": suite, "name": check.name, "anchor": check.anchor, "tolerance": tol,
           "relation": check.relation}
    t0 = time.perf_counter()
    try:
        value = float(check.fn(model, model.rng(f"{suite}/{check.name}"), **check.params))
        rec["residual"] = _clean(value)
        rec["status"] = "pass" if _compare(value, tol, check.relation) else "fail"
    except Skip as exc:
        rec["residual"] = None
        rec["status"] = f"skipped: {exc}"
    except WorkbenchError as exc:
        rec["residual"] = None
        rec["status"] = "error"
        rec["detail"] = f"{type(exc).__name__}: {exc}"
    if timings:
        rec["runtime"] = round(time.perf_counter() - t0, 3)
    return rec


def run_suite(model, suite, tolerances=None, timings=False):
    return [run_check(model, suite, c, tolerances, timings) for c in suite_checks(suite, model.config)]
