"""Test forms on the ultrastatic spacetime R x Sigma.

A degree-``p`` form is stored by product blocks.  Degree 0 has a single block
``"s"``.  Degree 1 is ``f = f_0 dt + f_Sigma`` with blocks ``"t"`` (spatial
0-forms) and ``"x"`` (spatial 1-forms).  Degree 2 is ``dt ^ alpha + beta``
with blocks ``"t"`` (spatial 1-forms) and ``"x"`` (spatial 2-forms).

Sign conventions follow from the metric ``dt^2 - h`` and are pinned down by
the adjointness ``<d a, b>_M = <a, delta b>_M``:

    d(phi)             = phi' dt + d phi
    d(A_0 dt + A)      = dt ^ (A' - d A_0) + d A
    delta(A_0 dt + A)  = -A_0' - delta A
    delta(dt ^ a + b)  = (delta a) dt + (-a' - delta b)
    <f, g>_M           = int dt sum_blocks sign * <f_block, g_block>_Sigma

with pairing signs ``+`` on scalars, ``(+, -)`` on degree 1 and ``(-, +)`` on
degree 2.  The wave operator acts blockwise as ``-d^2/dt^2 - Delta``.

Two concrete representations share one interface (``jet(t, order)``):
:class:`SpacetimeForm` holds closed-form time profiles and can be evaluated
anywhere, :class:`SampledForm` holds derivative jets on a fixed time grid and
is produced by Green operators and cutoffs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _jets
from .errors import ConfigurationError, DomainError
from .spatial_complex import SpatialComplex, SpatialForm

__all__ = [
    "TimeGrid",
    "TimeProfile",
    "SmoothBump",
    "ShiftedBump",
    "SmoothStep",
    "ProductProfile",
    "DerivativeProfile",
    "SpacetimeForm",
    "SampledForm",
    "CauchyData",
    "BLOCKS",
    "PAIRING_SIGN",
    "make_test_form",
    "st_exterior_derivative",
    "st_codifferential",
    "st_box",
    "lorentz_pairing",
    "cauchy_data",
    "form_to_json",
    "form_from_json",
]

BLOCKS = {0: (("s", 0),), 1: (("t", 0), ("x", 1)), 2: (("t", 1), ("x", 2))}
PAIRING_SIGN = {0: {"s": 1.0}, 1: {"t": 1.0, "x": -1.0}, 2: {"t": -1.0, "x": 1.0}}


def block_layout(complex, degree):
    """``(name, spatial degree)`` pairs that exist on ``complex``."""
    if degree not in BLOCKS:
        raise DomainError(f"unsupported spacetime degree {degree}")
    return tuple((b, q) for b, q in BLOCKS[degree] if q <= complex.dimension)


# ---------------------------------------------------------------------------
# time grid


@dataclass(frozen=True)
class TimeGrid:
    """Uniform samples on ``[-half_width, half_width]`` with trapezoid weights."""

    half_width: float = 3.0
    samples: int = 400

    def __post_init__(self):
        if self.samples < 16:
            raise ConfigurationError("time grid needs at least 16 samples")
        if not self.half_width > 0:
            raise ConfigurationError("time window must be positive")

    @property
    def t(self):
        return _grid_points(self.half_width, self.samples)

    @property
    def dt(self):
        return 2.0 * self.half_width / (self.samples - 1)

    @property
    def weights(self):
        w = np.full(self.samples, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return w

    def refined(self, factor=2):
        return TimeGrid(self.half_width, self.samples * factor)


@lru_cache(maxsize=32)
def _grid_points(T, n):
    t = np.linspace(-T, T, n)
    t.setflags(write=False)
    return t


# ---------------------------------------------------------------------------
# time profiles


class TimeProfile:
    """Closed-form time function with analytic derivatives.

    Subclasses implement ``jet(t, order)`` returning an array of shape
    ``(order + 1, len(t))`` whose row ``k`` is the ``k``-th derivative.
    """

    kind = "abstract"

    def jet(self, t, order=2):
        raise NotImplementedError

    def support(self):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def __call__(self, t):
        return self.jet(np.atleast_1d(np.asarray(t, float)), 0)[0]


def _bump_taylor(x, order):
    """Normalized Taylor coefficients in ``x`` of ``exp(1 - 1/(1 - x^2))``."""
    x = np.asarray(x, float)
    out = np.zeros((order + 1,) + x.shape)
    inside = np.abs(x) < 1.0
    inside &= (1.0 - x * x) > 1.0 / 700.0
    xi = x[inside]
    if xi.size == 0:
        return out
    phi = np.empty((order + 1, xi.size))
    phi[0] = 1.0 - 1.0 / (1.0 - xi * xi)
    for k in range(1, order + 1):
        phi[k] = -0.5 * ((1.0 - xi) ** (-(k + 1)) + (-1.0) ** k * (1.0 + xi) ** (-(k + 1)))
    out[:, inside] = _jets.exp(phi)
    return out


@lru_cache(maxsize=1)
def _bump_integral():
    xg, wg = np.polynomial.legendre.leggauss(400)
    return float(np.sum(wg * _bump_taylor(xg, 0)[0]))


@lru_cache(maxsize=1)
def _gauss(n=120):
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True)
class SmoothBump(TimeProfile):
    """``amplitude * exp(1 - 1/(1 - x^2))`` with ``x = (t - center)/half_width``."""

    center: float
    half_width: float
    amplitude: float = 1.0
    kind = "smooth_bump"

    def __post_init__(self):
        if not self.half_width > 0:
            raise ConfigurationError("bump half-width must be positive")

    def jet(self, t, order=2):
        w = self.half_width
        c = _bump_taylor((np.asarray(t, float) - self.center) / w, order)
        scale = w ** -np.arange(order + 1, dtype=float)
        return self.amplitude * _jets.to_derivs(c * scale[:, None])

    def support(self):
        return (self.center - self.half_width, self.center + self.half_width)

    def to_dict(self):
        return {"kind": self.kind, "center": self.center, "half_width": self.half_width,
                "amplitude": self.amplitude}


@dataclass(frozen=True)
class ShiftedBump(TimeProfile):
    """Smooth bump translated in time by ``shift``."""

    center: float
    half_width: float
    amplitude: float = 1.0
    shift: float = 0.0
    kind = "shifted_bump"

    def _base(self):
        return SmoothBump(self.center + self.shift, self.half_width, self.amplitude)

    def jet(self, t, order=2):
        return self._base().jet(t, order)

    def support(self):
        return self._base().support()

    def to_dict(self):
        return {"kind": self.kind, "center": self.center, "half_width": self.half_width,
                "amplitude": self.amplitude, "shift": self.shift}


@dataclass(frozen=True)
class SmoothStep(TimeProfile):
    """Smooth monotone step, 0 before ``start`` and ``amplitude`` after ``end``.

    The derivative is a normalized smooth bump on ``(start, end)``; the value is
    its running integral, evaluated by Gauss-Legendre quadrature.
    """

    start: float
    end: float
    amplitude: float = 1.0
    kind = "smooth_step"

    def __post_init__(self):
        if not self.end > self.start:
            raise ConfigurationError("smooth step needs start < end")

    def jet(self, t, order=2):
        t = np.asarray(t, float)
        w = 0.5 * (self.end - self.start)
        x = (t - 0.5 * (self.start + self.end)) / w
        out = np.zeros((order + 1,) + t.shape)
        val = np.where(x >= 1.0, 1.0, 0.0)
        mid = (x > -1.0) & (x < 1.0)
        if np.any(mid):
            xg, wg = _gauss()
            xm = x[mid]
            y = -1.0 + 0.5 * (xm[:, None] + 1.0) * (xg[None, :] + 1.0)
            integ = 0.5 * (xm + 1.0) * (_bump_taylor(y, 0)[0] @ wg)
            val[mid] = integ / _bump_integral()
        out[0] = val
        if order >= 1:
            b = SmoothBump(0.5 * (self.start + self.end), w, 1.0 / (w * _bump_integral()))
            out[1:] = b.jet(t, order - 1)
        return self.amplitude * out

    def support(self):
        return (self.start, np.inf)

    def to_dict(self):
        return {"kind": self.kind, "start": self.start, "end": self.end, "amplitude": self.amplitude}


@dataclass(frozen=True)
class ProductProfile(TimeProfile):
    """Pointwise product of two profiles."""

    first: TimeProfile
    second: TimeProfile
    kind = "product"

    def jet(self, t, order=2):
        return _jets.deriv_mul(self.first.jet(t, order), self.second.jet(t, order))

    def support(self):
        a1, b1 = self.first.support()
        a2, b2 = self.second.support()
        return (max(a1, a2), min(b1, b2))

    def to_dict(self):
        return {"kind": self.kind, "first": self.first.to_dict(), "second": self.second.to_dict()}


@dataclass(frozen=True)
class DerivativeProfile(TimeProfile):
    """``order``-th time derivative of another profile."""

    base: TimeProfile
    order: int = 1
    kind = "derivative"

    def jet(self, t, order=2):
        return self.base.jet(t, order + self.order)[self.order:]

    def support(self):
        return self.base.support()

    def to_dict(self):
        return {"kind": self.kind, "base": self.base.to_dict(), "order": self.order}


def derivative(profile, k=1):
    if k == 0:
        return profile
    if isinstance(profile, DerivativeProfile):
        return DerivativeProfile(profile.base, profile.order + k)
    return DerivativeProfile(profile, k)


def profile_from_dict(d):
    kind = d["kind"]
    if kind == "smooth_bump":
        return SmoothBump(d["center"], d["half_width"], d["amplitude"])
    if kind == "shifted_bump":
        return ShiftedBump(d["center"], d["half_width"], d["amplitude"], d["shift"])
    if kind == "smooth_step":
        return SmoothStep(d["start"], d["end"], d["amplitude"])
    if kind == "product":
        return ProductProfile(profile_from_dict(d["first"]), profile_from_dict(d["second"]))
    if kind == "derivative":
        return DerivativeProfile(profile_from_dict(d["base"]), d["order"])
    raise ConfigurationError(f"unknown profile kind {kind!r}")


# ---------------------------------------------------------------------------
# forms


def _matvec(jet, mat):
    """Apply a spatial matrix along the last axis of a jet array."""
    return jet @ mat.T


class _FormBase:
    degree: int
    complex: SpatialComplex
    window: float

    def layout(self):
        return block_layout(self.complex, self.degree)

    def values(self, t):
        return {b: a[0] for b, a in self.jet(t, 0).items()}

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, s):
        return self * s

    def _check_compatible(self, other):
        if self.degree != other.degree:
            raise DomainError(f"degree mismatch {self.degree} vs {other.degree}")
        if self.complex is not other.complex:
            raise DomainError("forms live on different spatial complexes")


class SpacetimeForm(_FormBase):
    """Form with closed-form time dependence.

    Parameters
    ----------
    complex : SpatialComplex
    degree : int
    terms : dict
        Block name to a tuple of ``(TimeProfile, coefficient array)`` pairs.
    window : float
        Half-width ``T`` of the representable window ``[-T, T]``.
    """

    def __init__(self, complex, degree, terms, window=3.0):
        self.complex = complex
        self.degree = degree
        self.window = float(window)
        lay = dict(block_layout(complex, degree))
        clean = {}
        for b, q in lay.items():
            items = []
            for prof, coeffs in terms.get(b, ()):
                c = np.asarray(coeffs, float)
                if c.shape != (complex.cochain_dims[q],):
                    raise ConfigurationError(f"block {b!r} expects {complex.cochain_dims[q]} coefficients")
                items.append((prof, c))
            clean[b] = tuple(items)
        extra = set(terms) - set(lay)
        if extra:
            raise ConfigurationError(f"unknown blocks {sorted(extra)} for degree {degree}")
        self.terms = clean

    def jet(self, t, order=2):
        t = np.asarray(t, float)
        out = {}
        for b, q in self.layout():
            acc = np.zeros((order + 1, t.size, self.complex.cochain_dims[q]))
            for prof, c in self.terms[b]:
                acc += prof.jet(t, order)[:, :, None] * c[None, None, :]
            out[b] = acc
        return out

    def support(self):
        lo, hi = np.inf, -np.inf
        for items in self.terms.values():
            for prof, c in items:
                if not np.any(c):
                    continue
                a, b = prof.support()
                lo, hi = min(lo, a), max(hi, b)
        return (lo, hi)

    def map_terms(self, fn, degree=None):
        """Build a new analytic form from ``fn(block, profile, coeffs) -> [(block, profile, coeffs)]``."""
        deg = self.degree if degree is None else degree
        new = {b: [] for b, _ in block_layout(self.complex, deg)}
        for b, items in self.terms.items():
            for prof, c in items:
                for nb, np_, nc in fn(b, prof, c):
                    if nb in new:
                        new[nb].append((np_, nc))
        return SpacetimeForm(self.complex, deg, new, self.window)

    def __add__(self, other):
        if isinstance(other, SpacetimeForm):
            self._check_compatible(other)
            terms = {b: self.terms[b] + other.terms[b] for b in self.terms}
            return SpacetimeForm(self.complex, self.degree, terms, max(self.window, other.window))
        return NotImplemented

    def __mul__(self, s):
        s = float(s)
        return self.map_terms(lambda b, p, c: [(b, p, s * c)])

    def sample(self, grid, order=4):
        return SampledForm(self.complex, self.degree, grid, self.jet(grid.t, order), self.window)


class SampledForm(_FormBase):
    """Form given by derivative jets on a fixed time grid.

    ``jets[block]`` has shape ``(K + 1, samples, cochain_dim)``.
    """

    def __init__(self, complex, degree, grid, jets, window=None):
        self.complex = complex
        self.degree = degree
        self.grid = grid
        self.window = float(grid.half_width if window is None else window)
        lay = block_layout(complex, degree)
        orders = {jets[b].shape[0] for b, _ in lay}
        K = min(orders) - 1
        self.jets = {b: np.asarray(jets[b])[:K + 1] for b, _ in lay}
        self.order = K

    def jet(self, t, order=2):
        t = np.asarray(t, float)
        if t.shape != self.grid.t.shape or not np.array_equal(t, self.grid.t):
            raise DomainError("sampled form can only be evaluated on its own grid")
        if order > self.order:
            raise DomainError(f"sampled form carries derivatives up to order {self.order}, {order} requested")
        return {b: a[: order + 1] for b, a in self.jets.items()}

    def __add__(self, other):
        if isinstance(other, _FormBase):
            self._check_compatible(other)
            K = min(self.order, other.order) if isinstance(other, SampledForm) else self.order
            oj = other.jet(self.grid.t, K)
            return SampledForm(self.complex, self.degree, self.grid,
                               {b: self.jets[b][: K + 1] + oj[b] for b in self.jets}, self.window)
        return NotImplemented

    def __radd__(self, other):
        return self.__add__(other)

    def __mul__(self, s):
        return SampledForm(self.complex, self.degree, self.grid,
                           {b: s * a for b, a in self.jets.items()}, self.window)

    def time_multiply(self, profile_jet):
        """Multiply every block by a scalar time function given as a derivative jet."""
        K = min(self.order, profile_jet.shape[0] - 1)
        pj = profile_jet[: K + 1, :, None]
        return SampledForm(self.complex, self.degree, self.grid,
                           {b: _jets.deriv_mul(pj, a[: K + 1]) for b, a in self.jets.items()}, self.window)

    def block_norms(self, mask=None):
        """Max over selected samples of the mass norm of each block."""
        out = {}
        for b, q in self.layout():
            v = self.jets[b][0]
            if mask is not None:
                v = v[mask]
            n = np.sqrt(np.abs(np.sum(v * v * self.complex.mass[q], axis=-1))) if v.size else np.zeros(1)
            out[b] = float(n.max()) if n.size else 0.0
        return out


@dataclass(frozen=True)
class CauchyData:
    """Restriction ``(value, velocity)`` of a form to a time slice."""

    complex: SpatialComplex
    degree: int
    value: dict
    velocity: dict

    def blocks(self):
        return block_layout(self.complex, self.degree)

    def __add__(self, other):
        return CauchyData(self.complex, self.degree,
                          {b: self.value[b] + other.value[b] for b in self.value},
                          {b: self.velocity[b] + other.velocity[b] for b in self.velocity})

    def __mul__(self, s):
        return CauchyData(self.complex, self.degree,
                          {b: s * v for b, v in self.value.items()},
                          {b: s * v for b, v in self.velocity.items()})

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# operations


def make_test_form(degree, blocks, window=3.0):
    """Assemble a test form from ``(TimeProfile, SpatialForm)`` pairs.

    The spatial degree of each pair selects the product block.
    """
    blocks = list(blocks)
    if not blocks:
        raise ConfigurationError("a test form needs at least one block")
    cx = blocks[0][1].complex
    lay = {q: b for b, q in block_layout(cx, degree)}
    terms = {b: [] for b in lay.values()}
    for prof, sf in blocks:
        if not isinstance(sf, SpatialForm):
            raise ConfigurationError("blocks must pair a TimeProfile with a SpatialForm")
        if sf.complex is not cx:
            raise ConfigurationError("all spatial forms must reference the same complex")
        if sf.degree not in lay:
            raise ConfigurationError(f"spatial degree {sf.degree} has no block in spacetime degree {degree}")
        a, b = prof.support()
        if a < -window or b > window:
            raise ConfigurationError(f"profile support {(a, b)} leaves the window [-{window}, {window}]")
        terms[lay[sf.degree]].append((prof, sf.coefficients))
    return SpacetimeForm(cx, degree, terms, window)


def _d_jets(jets, cx, degree):
    if degree == 0:
        s = jets["s"]
        out = {"t": s[1:], "x": _matvec(s[:-1], cx.d[0])}
        return out
    if degree == 1:
        t, x = jets["t"], jets["x"]
        out = {"t": x[1:] - _matvec(t[:-1], cx.d[0])}
        if cx.dimension >= 2:
            out["x"] = _matvec(x[:-1], cx.d[1])
        return out
    raise DomainError(f"exterior derivative of spacetime degree {degree} not supported")


def _delta_jets(jets, cx, degree):
    if degree == 1:
        t, x = jets["t"], jets["x"]
        return {"s": -t[1:] - _matvec(x[:-1], cx.codiff_matrix(1))}
    if degree == 2:
        t = jets["t"]
        out = {"t": _matvec(t[:-1], cx.codiff_matrix(1))}
        x = -t[1:]
        if "x" in jets:
            x = x - _matvec(jets["x"][:-1], cx.codiff_matrix(2))
        out["x"] = x
        return out
    raise DomainError(f"codifferential of spacetime degree {degree} not supported")


def _box_jets(jets, cx, degree):
    return {b: -a[2:] - _matvec(a[:-2], cx.laplacian_matrix(q))
            for (b, q), a in ((bq, jets[bq[0]]) for bq in block_layout(cx, degree))}


def st_exterior_derivative(f):
    """Spacetime exterior derivative (degrees 0 and 1)."""
    cx = f.complex
    if isinstance(f, SpacetimeForm):
        if f.degree == 0:
            def fn(b, p, c):
                out = [("t", derivative(p), c)]
                return out + [("x", p, cx.d[0] @ c)]
            return f.map_terms(fn, 1)
        if f.degree == 1:
            def fn(b, p, c):
                if b == "t":
                    return [("t", p, -(cx.d[0] @ c))]
                out = [("t", derivative(p), c)]
                if cx.dimension >= 2:
                    out.append(("x", p, cx.d[1] @ c))
                return out
            return f.map_terms(fn, 2)
        raise DomainError(f"exterior derivative of spacetime degree {f.degree} not supported")
    jets = f.jet(f.grid.t, f.order)
    return SampledForm(cx, f.degree + 1, f.grid, _d_jets(jets, cx, f.degree), f.window)


def st_codifferential(f):
    """Spacetime codifferential (degrees 1 and 2)."""
    cx = f.complex
    if isinstance(f, SpacetimeForm):
        if f.degree == 1:
            def fn(b, p, c):
                if b == "t":
                    return [("s", derivative(p), -c)]
                return [("s", p, -(cx.codiff_matrix(1) @ c))]
            return f.map_terms(fn, 0)
        if f.degree == 2:
            def fn(b, p, c):
                if b == "t":
                    return [("t", p, cx.codiff_matrix(1) @ c), ("x", derivative(p), -c)]
                return [("x", p, -(cx.codiff_matrix(2) @ c))]
            return f.map_terms(fn, 1)
        raise DomainError(f"codifferential of spacetime degree {f.degree} not supported")
    jets = f.jet(f.grid.t, f.order)
    return SampledForm(cx, f.degree - 1, f.grid, _delta_jets(jets, cx, f.degree), f.window)


def st_box(f):
    """Blockwise wave operator ``-d^2/dt^2 - Delta``."""
    cx = f.complex
    if isinstance(f, SpacetimeForm):
        lay = dict(block_layout(cx, f.degree))

        def fn(b, p, c):
            return [(b, derivative(p, 2), -c), (b, p, -(cx.laplacian_matrix(lay[b]) @ c))]
        return f.map_terms(fn)
    jets = f.jet(f.grid.t, f.order)
    return SampledForm(cx, f.degree, f.grid, _box_jets(jets, cx, f.degree), f.window)


def _overlap_support(f, g):
    lo, hi = -np.inf, np.inf
    for h in (f, g):
        if isinstance(h, SpacetimeForm):
            a, b = h.support()
            lo, hi = max(lo, a), min(hi, b)
    return lo, hi


def lorentz_pairing(f, g, grid, method="trapezoid", panels=64, nodes=48):
    """Indefinite pairing ``<f, g>_M``.

    Parameters
    ----------
    grid : TimeGrid
        Trapezoid grid (also bounds the Gauss interval).
    method : {"trapezoid", "gauss"}
        ``"gauss"`` integrates by composite Gauss-Legendre over the overlap of
        the analytic supports; it needs forms evaluable off the grid.
    """
    if f.degree != g.degree:
        raise DomainError(f"cannot pair degree {f.degree} with degree {g.degree}")
    if f.complex is not g.complex:
        raise DomainError("forms live on different spatial complexes")
    cx = f.complex
    if method == "trapezoid":
        t, w = grid.t, grid.weights
    elif method == "gauss":
        if isinstance(f, SampledForm) or isinstance(g, SampledForm):
            raise DomainError("Gauss pairing needs forms evaluable off the grid")
        lo, hi = _overlap_support(f, g)
        lo, hi = max(lo, -grid.half_width), min(hi, grid.half_width)
        if not hi > lo:
            return 0.0
        xg, wg = np.polynomial.legendre.leggauss(nodes)
        edges = np.linspace(lo, hi, panels + 1)
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
        t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        w = (half[:, None] * wg[None, :]).ravel()
    else:
        raise DomainError(f"unknown quadrature {method!r}")
    jf, jg = f.jet(t, 0), g.jet(t, 0)
    total = 0.0
    for b, q in block_layout(cx, f.degree):
        dens = np.sum(jf[b][0] * jg[b][0] * cx.mass[q], axis=-1)
        total += PAIRING_SIGN[f.degree][b] * float(w @ dens)
    return total


def cauchy_data(f, t):
    """Value and velocity of ``f`` (form or solution) on the slice at time ``t``."""
    T = getattr(f, "window", np.inf)
    if not abs(t) <= T + 1e-12:
        raise DomainError(f"time {t} outside the window [-{T}, {T}]")
    jets = f.jet(np.array([float(t)]), 1)
    return CauchyData(f.complex, f.degree,
                      {b: a[0, 0].copy() for b, a in jets.items()},
                      {b: a[1, 0].copy() for b, a in jets.items()})


def form_to_json(f):
    """Serialize an analytic form to a JSON string."""
    if not isinstance(f, SpacetimeForm):
        raise DomainError("only analytic forms are serializable")
    terms = []
    for b, items in f.terms.items():
        for prof, c in items:
            terms.append({"block": b, "profile": prof.to_dict(), "coefficients": c.tolist()})
    return json.dumps({"degree": f.degree, "window": f.window, "terms": terms})


def form_from_json(text, complex):
    """Inverse of :func:`form_to_json`."""
    d = json.loads(text)
    terms = {}
    for item in d["terms"]:
        terms.setdefault(item["block"], []).append(
            (profile_from_dict(item["profile"]), np.asarray(item["coefficients"], float)))
    return SpacetimeForm(complex, d["degree"], terms, d["window"])
