"""Field algebra words, gauge maps and gauge-parameter operators.

Algebra elements are finite sums of words ``A(f_{i_1}) ... A(f_{i_k})`` over
an indexed family of test forms.  The canonical representative orders every
word non-decreasingly using

    A(f_j) A(f_i) = A(f_i) A(f_j) + i G(f_i, f_j)      (i < j).

The gauge-parameter operators act on 1-forms:

    Box_xi   = delta d + (1/xi) d delta
    J_R      = 1 + (1/xi - 1) d R delta
    J_R^{-1} = 1 + (xi - 1) d R delta
    J_L      = 1 + (1/xi - 1) d L delta

with ``R`` the zero-data retarded solve and ``L = eta_- G_+ + eta_+ G_-`` for a
smooth partition ``eta_+ + eta_- = 1`` across a slab.  Because ``d R delta``
is idempotent, the inverse of ``J_R`` carries the coefficient ``xi - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IntegrationError
from .spacetime_forms import (
    CauchyData,
    SampledForm,
    SmoothStep,
    SpacetimeForm,
    TimeGrid,
    block_layout,
    lorentz_pairing,
    st_box,
    st_codifferential,
    st_exterior_derivative,
)
from .wave_kernel import green_advanced, green_retarded, pauli_jordan, g_pairing

__all__ = [
    "FieldAlgebra",
    "AlgebraElement",
    "normal_form",
    "gauge_shifts",
    "gauge_transform",
    "is_observable",
    "ideal_generator",
    "represent",
    "observable_ideal_separation",
    "r_operator",
    "l_operator",
    "l_defect_check",
    "i_r",
    "i_r_inverse",
    "i_l",
    "box_xi",
    "solve_box_xi",
    "one_form_frame",
]


# ---------------------------------------------------------------------------
# symbolic algebra


class FieldAlgebra:
    """Indexed generators with a cached antisymmetrized commutator matrix."""

    def __init__(self, grid=None):
        self.grid = grid if grid is not None else TimeGrid()
        self.forms = []
        self._G = {}

    def add(self, f):
        self.forms.append(f)
        return len(self.forms) - 1

    def generator(self, i, coeff=1.0):
        return AlgebraElement(self, {(i,): complex(coeff)})

    def one(self, coeff=1.0):
        return AlgebraElement(self, {(): complex(coeff)})

    def G(self, i, j):
        """Antisymmetrized ``G(f_i, f_j)``."""
        if i == j:
            return 0.0
        key = (min(i, j), max(i, j))
        if key not in self._G:
            a, b = self.forms[key[0]], self.forms[key[1]]
            gab = g_pairing(a, b, self.grid)
            gba = g_pairing(b, a, self.grid)
            self._G[key] = 0.5 * (gab - gba)
        v = self._G[key]
        return v if i < j else -v

    def set_commutators(self, matrix):
        """Install an antisymmetric matrix ``G[i, j]`` directly."""
        n = matrix.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                self._G[(i, j)] = float(matrix[i, j])


@dataclass
class AlgebraElement:
    """Linear combination of words; ``terms`` maps index tuples to coefficients."""

    algebra: FieldAlgebra
    terms: dict = field(default_factory=dict)

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0.0) + c
        return AlgebraElement(self.algebra, out)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            out = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    out[w] = out.get(w, 0.0) + c1 * c2
            return AlgebraElement(self.algebra, out)
        return AlgebraElement(self.algebra, {w: c * other for w, c in self.terms.items()})

    __rmul__ = __mul__

    @property
    def degree(self):
        return max((len(w) for w in self.terms), default=0)

    def max_abs(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def pruned(self, tol=0.0):
        return AlgebraElement(self.algebra, {w: c for w, c in self.terms.items() if abs(c) > tol})

    def distance(self, other):
        """Largest coefficient difference between two elements."""
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) for k in keys), default=0.0)


def _descent(word, strategy, rng):
    pos = [k for k in range(len(word) - 1) if word[k] > word[k + 1]]
    if not pos:
        return None
    if strategy == "leftmost":
        return pos[0]
    if strategy == "rightmost":
        return pos[-1]
    return pos[int(rng.integers(len(pos)))]


def normal_form(e, strategy="leftmost", rng=None):
    """Canonical representative with every word sorted non-decreasingly.

    ``strategy`` picks which adjacent inversion is rewritten first
    (``"leftmost"``, ``"rightmost"`` or ``"random"``); the result does not
    depend on it.
    """
    if strategy == "random" and rng is None:
        rng = np.random.default_rng(0)
    alg = e.algebra
    out = {}
    stack = list(e.terms.items())
    while stack:
        w, c = stack.pop()
        if c == 0:
            continue
        k = _descent(w, strategy, rng)
        if k is None:
            out[w] = out.get(w, 0.0) + c
            continue
        j, i = w[k], w[k + 1]
        stack.append((w[:k] + (i, j) + w[k + 2:], c))
        g = alg.G(i, j)
        if g != 0.0:
            stack.append((w[:k] + w[k + 2:], c * 1j * g))
    return AlgebraElement(alg, {w: c for w, c in out.items() if c != 0})


def gauge_shifts(algebra, gauge):
    """``(d Lambda)(f_i)`` for every generator."""
    if gauge is None:
        return np.zeros(len(algebra.forms))
    dl = st_exterior_derivative(gauge)
    out = []
    for f in algebra.forms:
        method = "trapezoid" if isinstance(f, SampledForm) else "gauss"
        out.append(lorentz_pairing(dl, f, algebra.grid, method=method))
    return np.array(out)


def gauge_transform(e, shifts):
    """Apply ``A(f_i) -> A(f_i) - shifts[i]`` to every word."""
    out = {}
    for w, c in e.terms.items():
        partial = {(): c}
        for i in w:
            nxt = {}
            for pw, pc in partial.items():
                nxt[pw + (i,)] = nxt.get(pw + (i,), 0.0) + pc
                if shifts[i] != 0:
                    nxt[pw] = nxt.get(pw, 0.0) - pc * shifts[i]
            partial = nxt
        for pw, pc in partial.items():
            out[pw] = out.get(pw, 0.0) + pc
    return AlgebraElement(e.algebra, out)


def is_observable(f, grid=None, tol=1e-8):
    """``|delta f| <= tol`` on the grid."""
    grid = grid if grid is not None else TimeGrid(f.window)
    jets = st_codifferential(f).jet(grid.t, 0)
    return max(float(np.abs(a).max()) for a in jets.values()) <= tol


def ideal_generator(algebra, f, gauge):
    """``A(Box f) - Lambda(delta Box f)`` with ``Box f`` added as a generator."""
    bf = st_box(f)
    i = algebra.add(bf)
    val = 0.0
    if gauge is not None:
        val = lorentz_pairing(gauge, st_codifferential(bf), algebra.grid, method="gauss")
    return algebra.generator(i) - algebra.one(val)


def represent(e, space, operators=None):
    """Sparse operator of an algebra element (``Lambda`` of ``space`` is ignored for scalars)."""
    import scipy.sparse as sp

    from .fock_krein import GBOperator

    ops = operators if operators is not None else {}
    M = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for w, c in e.terms.items():
        P = sp.identity(space.dim, format="csr", dtype=complex)
        for i in w:
            if i not in ops:
                ops[i] = space.field_operator(e.algebra.forms[i])
            P = P @ ops[i].matrix
        M = M + c * P
    return GBOperator(M, space)


def observable_ideal_separation(space, corpus, rng, samples=20):
    """Norms of represented observables against represented ideal generators.

    Returns
    -------
    dict
        ``observable_min``, ``ideal_max`` and their ratio.
    """
    obs, ideal = [], []
    alg = FieldAlgebra(space.structure.grid)
    for _ in range(samples):
        f = corpus.coclosed_form(rng)
        obs.append(space.field_operator(f).norm_bound())
        g = corpus.generic_form(rng)
        gen = ideal_generator(alg, g, space.gauge)
        ideal.append(represent(gen, space).norm_bound())
    omin, imax = float(min(obs)), float(max(ideal))
    return {"observable_min": omin, "ideal_max": imax,
            "ratio": omin / imax if imax > 0 else float("inf")}


# ---------------------------------------------------------------------------
# gauge-parameter operators


def r_operator(f, t_initial=None, grid=None, order=8):
    """Zero-data solve of ``Box u = f`` from ``t_initial``."""
    grid = grid if grid is not None else (f.grid if isinstance(f, SampledForm) else TimeGrid(f.window))
    ta = -grid.half_width if t_initial is None else t_initial
    if isinstance(f, SpacetimeForm):
        lo, _ = f.support()
        if lo < ta:
            raise DomainError(f"source support starts at {lo} before the initial time {ta}")
    u = green_retarded(f, grid, order)
    if ta > -grid.half_width:
        mask = grid.t < ta
        for a in u.jets.values():
            a[:, mask] = 0.0
    return u


def _partition(window, grid, order):
    """Jets of ``(eta_plus, eta_minus)`` with ``eta_plus + eta_minus = 1``."""
    step = SmoothStep(*window).jet(grid.t, order)
    one = np.zeros_like(step)
    one[0] = 1.0
    return step, one - step


def l_operator(f, window=(-0.5, 0.5), grid=None, order=8):
    """``L f = eta_- G_+ f + eta_+ G_- f``."""
    grid = grid if grid is not None else (f.grid if isinstance(f, SampledForm) else TimeGrid(f.window))
    ep, em = _partition(window, grid, order + 2)
    return (green_retarded(f, grid, order).time_multiply(em)
            + green_advanced(f, grid, order).time_multiply(ep))


def l_defect_check(f, window=(-0.5, 0.5), grid=None):
    """Norm of the Cauchy data of ``G(f - L Box f)``."""
    grid = grid if grid is not None else TimeGrid(f.window)
    bf = st_box(f)
    lb = l_operator(bf, window, grid)
    diff = f.sample(grid, lb.order) - lb if isinstance(f, SpacetimeForm) else f - lb
    sol = pauli_jordan(diff, grid)
    tot = 0.0
    for b, q in block_layout(f.complex, f.degree):
        tot += float(np.sum(sol.modes.value[b] ** 2) + np.sum(sol.modes.velocity[b] ** 2))
    return float(np.sqrt(tot))


def _coefficient(xi):
    if not xi > 0:
        raise DomainError("gauge parameter must be positive")
    return 1.0 / xi - 1.0


def _as_sampled(psi, grid, order):
    return psi.sample(grid, order) if isinstance(psi, SpacetimeForm) else psi


def _dxd(psi, inner, grid):
    return st_exterior_derivative(inner(st_codifferential(psi), grid))


def i_r(psi, xi, grid=None, order=8):
    """``J_R psi = psi + (1/xi - 1) d R delta psi``."""
    grid = grid if grid is not None else TimeGrid(psi.window)
    c = _coefficient(xi)
    base = _as_sampled(psi, grid, order)
    if c == 0.0:
        return base
    return base + _dxd(psi, lambda s, g: r_operator(s, None, g, order), grid) * c


def i_r_inverse(psi, xi, grid=None, order=8):
    """``J_R^{-1} psi = psi + (xi - 1) d R delta psi``."""
    grid = grid if grid is not None else TimeGrid(psi.window)
    c = xi - 1.0
    _coefficient(xi)
    base = _as_sampled(psi, grid, order)
    if c == 0.0:
        return base
    return base + _dxd(psi, lambda s, g: r_operator(s, None, g, order), grid) * c


def i_l(f, xi, window=(-0.5, 0.5), grid=None, order=8):
    """``J_L f = f + (1/xi - 1) d L delta f``."""
    grid = grid if grid is not None else TimeGrid(f.window)
    c = _coefficient(xi)
    base = _as_sampled(f, grid, order)
    if c == 0.0:
        return base
    return base + _dxd(f, lambda s, g: l_operator(s, window, g, order), grid) * c


def box_xi(f, xi):
    """``delta d f + (1/xi) d delta f``."""
    _coefficient(xi)
    a = st_codifferential(st_exterior_derivative(f))
    b = st_exterior_derivative(st_codifferential(f))
    return a + b * (1.0 / xi)


# ---------------------------------------------------------------------------
# mode-block integration of Box_xi u = 0


@dataclass(frozen=True)
class OneFormFrame:
    """Mass-orthonormal 1-form frame split into exact, co-exact and harmonic parts."""

    scalar_vectors: np.ndarray
    scalar_lam: np.ndarray
    constant_vectors: np.ndarray
    exact: np.ndarray
    coexact: np.ndarray
    coexact_lam: np.ndarray
    harmonic: np.ndarray


def one_form_frame(complex):
    """Scalar eigenforms ``e_a``, exact ``d e_a/sqrt(lambda_a)``, co-exact and harmonic 1-forms."""
    b0, b1 = complex.eigenbasis(0), complex.eigenbasis(1)
    p0 = b0.perp_indices
    sv = b0.vectors[:, p0]
    lam = np.asarray(b0.eigenvalues)[p0]
    exact = (complex.d[0] @ sv) / np.sqrt(lam)
    if complex.dimension >= 2:
        b2 = complex.eigenbasis(2)
        p2 = b2.perp_indices
        mu = np.asarray(b2.eigenvalues)[p2]
        coexact = (complex.codiff_matrix(2) @ b2.vectors[:, p2]) / np.sqrt(mu)
    else:
        mu = np.zeros(0)
        coexact = np.zeros((complex.cochain_dims[1], 0))
    harm = b1.vectors[:, b1.kernel_indices]
    const = b0.vectors[:, b0.kernel_indices]
    return OneFormFrame(sv, lam, const, exact, coexact, mu, harm)


def _rk4(A, y0, h, steps):
    y = y0.copy()
    for _ in range(steps):
        k1 = A(y)
        k2 = A(y + 0.5 * h * k1)
        k3 = A(y + 0.5 * h * k2)
        k4 = A(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _fd_derivatives(values, dt):
    """First and second time derivatives by 8th-order finite differences."""
    c1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    c2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
    n = values.shape[0]
    d1 = np.full(values.shape, np.nan)
    d2 = np.full(values.shape, np.nan)
    for k, (a, b) in enumerate(zip(c1, c2)):
        sl = slice(k, n - 8 + k)
        if k == 0:
            d1[4:n - 4] = 0.0
            d2[4:n - 4] = 0.0
        d1[4:n - 4] += a * values[sl]
        d2[4:n - 4] += b * values[sl]
    return d1 / dt, d2 / dt ** 2


@dataclass
class BoxXiSolution:
    """Sampled solution of ``Box_xi u = 0`` with mode histories."""

    form: SampledForm
    xi: float
    substeps: int
    fd_form: SampledForm


def solve_box_xi(data, xi, grid=None, substeps=16, t0=None, blowup=1e8):
    """Integrate ``Box_xi u = 0`` per spatial mode with classical RK4.

    Parameters
    ----------
    data : CauchyData
        Degree-1 value and velocity at ``t0``.
    xi : float
    grid : TimeGrid
        Output grid; ``t0`` must be one of its points (default: first point).
    substeps : int
        RK4 steps per grid interval.

    Returns
    -------
    BoxXiSolution
        ``form`` carries jets (value, velocity, acceleration from the ODE);
        ``fd_form`` carries derivatives rebuilt by finite differences for an
        independent residual check (interior samples only).
    """
    c = _coefficient(xi)
    cx = data.complex
    grid = grid if grid is not None else TimeGrid()
    t = grid.t
    i0 = 0 if t0 is None else int(np.argmin(np.abs(t - t0)))
    if t0 is not None and abs(t[i0] - t0) > 1e-12:
        raise DomainError("initial time must be a grid point")
    fr = one_form_frame(cx)
    m0, m1 = cx.mass[0], cx.mass[1]

    def proj(vec, basis, mass):
        return basis.T @ (mass * vec)

    # mode coordinates
    a0 = proj(data.value["t"], fr.scalar_vectors, m0)
    a0d = proj(data.velocity["t"], fr.scalar_vectors, m0)
    k0 = proj(data.value["t"], fr.constant_vectors, m0)
    k0d = proj(data.velocity["t"], fr.constant_vectors, m0)
    be = proj(data.value["x"], fr.exact, m1)
    bed = proj(data.velocity["x"], fr.exact, m1)
    bc = proj(data.value["x"], fr.coexact, m1)
    bcd = proj(data.velocity["x"], fr.coexact, m1)
    bh = proj(data.value["x"], fr.harmonic, m1)
    bhd = proj(data.velocity["x"], fr.harmonic, m1)
    lam, mu = fr.scalar_lam, fr.coexact_lam
    rl = np.sqrt(lam)
    nl, nc, nk, nh = lam.size, mu.size, k0.size, bh.size

    def unpack(y):
        parts = np.split(y, np.cumsum([nl, nl, nc, nk, nh, nl, nl, nc, nk]))
        return parts

    def rhs(y):
        al, b, cc, kk, hh, ald, bd, ccd, kkd, hhd = unpack(y)
        alpha_dd = xi * (-lam * al - c * rl * bd)
        beta_dd = -c * rl * ald - (1.0 + c) * lam * b
        return np.concatenate([ald, bd, ccd, kkd, hhd, alpha_dd, beta_dd, -mu * cc,
                               np.zeros(nk), np.zeros(nh)])

    y0 = np.concatenate([a0, be, bc, k0, bh, a0d, bed, bcd, k0d, bhd])
    Y = np.empty((t.size, y0.size))
    Y[i0] = y0
    h = grid.dt / substeps
    scale = max(1.0, float(np.abs(y0).max()))
    for direction in (1, -1):
        y = y0
        idx = range(i0 + 1, t.size) if direction > 0 else range(i0 - 1, -1, -1)
        for i in idx:
            y = _rk4(rhs, y, direction * h, substeps)
            if not np.all(np.isfinite(y)) or np.abs(y).max() > blowup * scale:
                raise IntegrationError(f"mode amplitudes blew up near t = {t[i]:.3f}; reduce the step")
            Y[i] = y
    acc = np.array([rhs(y) for y in Y])

    def synth(arr):
        al, b, cc, kk, hh = np.split(arr, np.cumsum([nl, nl, nc, nk]), axis=1)[:5]
        tb = al @ fr.scalar_vectors.T + kk @ fr.constant_vectors.T
        xb = b @ fr.exact.T + cc @ fr.coexact.T + hh @ fr.harmonic.T
        return tb, xb

    half = y0.size // 2
    v_t, v_x = synth(Y[:, :half])
    d_t, d_x = synth(Y[:, half:])
    a_t, a_x = synth(acc[:, half:])
    jets = {"t": np.stack([v_t, d_t, a_t]), "x": np.stack([v_x, d_x, a_x])}
    form = SampledForm(cx, 1, grid, jets)
    fd = {}
    for b, v in (("t", v_t), ("x", v_x)):
        d1, d2 = _fd_derivatives(v, grid.dt)
        fd[b] = np.stack([v, d1, d2])
    return BoxXiSolution(form, xi, substeps, SampledForm(cx, 1, grid, fd))


def box_xi_residual(solution):
    """Max of ``|Box_xi u|`` on interior samples using finite-difference jets."""
    r = box_xi(solution.fd_form, solution.xi)
    jets = r.jet(r.grid.t, 0)
    return max(float(np.nanmax(np.abs(a[0][4:-4]))) for a in jets.values())
