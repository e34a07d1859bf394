"""One-particle structure: Krein space, the maps tau and kappa, zero modes.

The Krein space is the complexification of ``-Omega^0_perp (+) Omega^1_perp``
stored as mode coefficients over the non-kernel eigenforms of the spatial
Laplacian.  Because eigenforms are mass-orthonormal, the indefinite product is

    <u, v> = -sum conj(u0) v0 + sum conj(u1) v1.

Cauchy data enter through ``tau(f, f') = Delta^{1/4} f + i Delta^{-1/4} f'``
blockwise, and ``kappa(f) = tau(P_perp Psi_0^{Gf})``.

The harmonic remainder lives in the finite symplectic space ``Z`` of harmonic
Cauchy data, coordinatized by ``z = (v, w)`` (value and velocity over the
kernel modes, scalar mode first).  With ``S = diag(-1, 1, ..., 1)``

    sigma_Z(z, z') = v . S w' - w . S v',    J(v, w) = (S w, -S v),

so that ``K(z, z') = -sigma_Z(z, J z')`` is the Euclidean product of the
coordinates.  The Lagrangian splitting uses ``Y = {(0, w)}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError
from .spacetime_forms import TimeGrid, lorentz_pairing
from .wave_kernel import (
    ModeCoefficients,
    SolutionForm,
    _frequencies,
    g_pairing,
    pauli_jordan,
    timeslice_reduce,
)

__all__ = [
    "OneParticleStructure",
    "KreinVector",
    "ZeroModeVector",
    "tau",
    "kappa",
    "krein_inner",
    "gz_form",
    "harmonic_sigma",
    "zero_mode",
    "complex_structure_J",
    "k_inner",
    "energy_apply",
    "energy_form",
    "evolve",
    "positive_frequency_spectrum",
    "frequency_profile",
    "extend_kappa",
    "harmonic_dual_form",
]

LEAKAGE_TOL = 1e-8


class OneParticleStructure:
    """Spectral data shared by all one-particle maps.

    Parameters
    ----------
    complex : SpatialComplex
        Two-dimensional (or one-dimensional) torus.
    grid : TimeGrid, optional
        Quadrature grid for the Pauli-Jordan moments.
    """

    def __init__(self, complex, grid=None):
        self.complex = complex
        self.grid = grid if grid is not None else TimeGrid()
        self.bases = {0: complex.eigenbasis(0), 1: complex.eigenbasis(1)}
        self.perp = {q: b.perp_indices for q, b in self.bases.items()}
        self.kernel = {q: np.asarray(b.kernel_indices) for q, b in self.bases.items()}
        self.lam = {q: _frequencies(b)[0][self.perp[q]] for q, b in self.bases.items()}
        self.omega = {q: np.sqrt(v) for q, v in self.lam.items()}
        self.up = {q: v ** 0.25 for q, v in self.lam.items()}
        self.down = {q: v ** -0.25 for q, v in self.lam.items()}
        self.zero_dim = self.kernel[0].size + self.kernel[1].size
        self.S = np.concatenate([-np.ones(self.kernel[0].size), np.ones(self.kernel[1].size)])

    @property
    def dims(self):
        return (self.perp[0].size, self.perp[1].size)

    def zero(self):
        return KreinVector(self, np.zeros(self.dims[0], complex), np.zeros(self.dims[1], complex))


@dataclass(frozen=True, eq=False)
class KreinVector:
    """Element of the Krein space, stored as non-kernel mode coefficients."""

    structure: OneParticleStructure
    scalar: np.ndarray
    oneform: np.ndarray

    def __post_init__(self):
        if self.scalar.shape != (self.structure.dims[0],) or self.oneform.shape != (self.structure.dims[1],):
            raise DomainError("Krein vector blocks do not match the non-kernel mode counts")

    @property
    def array(self):
        return np.concatenate([self.scalar, self.oneform])

    @property
    def signs(self):
        return np.concatenate([-np.ones(self.scalar.size), np.ones(self.oneform.size)])

    def inner(self, other):
        return krein_inner(self, other)

    def _new(self, s, o):
        return KreinVector(self.structure, s, o)

    def __add__(self, other):
        return self._new(self.scalar + other.scalar, self.oneform + other.oneform)

    def __sub__(self, other):
        return self._new(self.scalar - other.scalar, self.oneform - other.oneform)

    def __neg__(self):
        return self._new(-self.scalar, -self.oneform)

    def __mul__(self, c):
        return self._new(c * self.scalar, c * self.oneform)

    __rmul__ = __mul__

    def conj(self):
        return self._new(np.conj(self.scalar), np.conj(self.oneform))

    def norm(self):
        """Euclidean (fundamental-symmetry) norm."""
        return float(np.linalg.norm(self.array))

    @classmethod
    def from_array(cls, structure, arr):
        n0 = structure.dims[0]
        arr = np.asarray(arr, complex)
        return cls(structure, arr[:n0].copy(), arr[n0:].copy())


def krein_inner(u, v):
    """Indefinite product, conjugate-linear in ``u``."""
    return complex(-np.vdot(u.scalar, v.scalar) + np.vdot(u.oneform, v.oneform))


def _modal_data(data, structure):
    out = {}
    for b, q in (("t", 0), ("x", 1)):
        basis = structure.bases[q]
        out[b] = (basis.coefficients(data.value[b]), basis.coefficients(data.velocity[b]))
    return out


def _tau_modes(structure, modes):
    blocks = []
    for b, q in (("t", 0), ("x", 1)):
        a, v = modes[b]
        ker = structure.kernel[q]
        leak = max(np.abs(a[ker]).max(initial=0.0), np.abs(v[ker]).max(initial=0.0))
        if leak > LEAKAGE_TOL:
            raise SingularityError(f"harmonic component {leak:.3e} in block {b!r} (kernel modes {ker.tolist()})")
        p = structure.perp[q]
        blocks.append(structure.up[q] * a[p] + 1j * structure.down[q] * v[p])
    return KreinVector(structure, blocks[0], blocks[1])


def tau(data, structure):
    """``Delta^{1/4} value + i Delta^{-1/4} velocity`` on degree-1 Cauchy data."""
    if data.degree != 1:
        raise DomainError("tau acts on Cauchy data of 1-forms")
    return _tau_modes(structure, _modal_data(data, structure))


def _pj_modes(f, structure):
    if f.degree != 1:
        raise DomainError("kappa acts on 1-forms")
    sol = pauli_jordan(f, structure.grid)
    return {b: (sol.modes.value[b], sol.modes.velocity[b]) for b in ("t", "x")}


def kappa(f, structure):
    """``tau(P_perp Psi_0^{Gf})``."""
    modes = _pj_modes(f, structure)
    proj = {}
    for b, q in (("t", 0), ("x", 1)):
        a, v = (m.copy() for m in modes[b])
        a[structure.kernel[q]] = 0.0
        v[structure.kernel[q]] = 0.0
        proj[b] = (a, v)
    return _tau_modes(structure, proj)


# ---------------------------------------------------------------------------
# zero modes


@dataclass(frozen=True, eq=False)
class ZeroModeVector:
    """Harmonic Cauchy data ``(v, w)``; scalar kernel mode first in each slot."""

    structure: OneParticleStructure
    value: np.ndarray
    velocity: np.ndarray

    @property
    def array(self):
        return np.concatenate([self.value, self.velocity])

    def __add__(self, other):
        return ZeroModeVector(self.structure, self.value + other.value, self.velocity + other.velocity)

    def __mul__(self, c):
        return ZeroModeVector(self.structure, c * self.value, c * self.velocity)

    __rmul__ = __mul__

    def y_part(self):
        """Component in ``Y`` (velocity slot)."""
        return ZeroModeVector(self.structure, np.zeros_like(self.value), self.velocity.copy())

    def ytilde_part(self):
        return ZeroModeVector(self.structure, self.value.copy(), np.zeros_like(self.velocity))


def zero_mode(f, structure):
    """Harmonic part of ``Psi_0^{Gf}`` as a point of ``Z``."""
    modes = _pj_modes(f, structure)
    k0, k1 = structure.kernel[0], structure.kernel[1]
    v = np.concatenate([modes["t"][0][k0], modes["x"][0][k1]])
    w = np.concatenate([modes["t"][1][k0], modes["x"][1][k1]])
    return ZeroModeVector(structure, v, w)


def harmonic_sigma(z1, z2):
    """``sigma_Z(z1, z2)``."""
    S = z1.structure.S
    return float(z1.value @ (S * z2.velocity) - z1.velocity @ (S * z2.value))


def complex_structure_J(z):
    S = z.structure.S
    return ZeroModeVector(z.structure, S * z.velocity, -S * z.value)


def k_inner(z1, z2):
    """``K(z1, z2) = -sigma_Z(z1, J z2)``."""
    return -harmonic_sigma(z1, complex_structure_J(z2))


def gz_form(f, g, structure, method="trapezoid"):
    """``G_Z(f, g) = G(f, g) - Im <kappa f, kappa g>``."""
    G = g_pairing(f, g, structure.grid, method)
    return G - krein_inner(kappa(f, structure), kappa(g, structure)).imag


# ---------------------------------------------------------------------------
# energy and frequency content


def energy_apply(u):
    """Mode-wise multiplication by ``sqrt(lambda)``."""
    s = u.structure
    return KreinVector(s, s.omega[0] * u.scalar, s.omega[1] * u.oneform)


def energy_form(f, structure):
    k = kappa(f, structure)
    return krein_inner(k, energy_apply(k)).real


def evolve(u, t):
    """``exp(iHt) u``."""
    s = u.structure
    return KreinVector(s, np.exp(1j * s.omega[0] * t) * u.scalar, np.exp(1j * s.omega[1] * t) * u.oneform)


def tau_along(solution, t, structure):
    """``tau(Psi_t)`` of a homogeneous solution after removing harmonic modes."""
    from .spacetime_forms import cauchy_data

    data = cauchy_data(solution, t)
    modes = _modal_data(data, structure)
    for b, q in (("t", 0), ("x", 1)):
        for arr in modes[b]:
            arr[structure.kernel[q]] = 0.0
    return _tau_modes(structure, modes)


def positive_frequency_spectrum(f, g, structure, samples=1024, leakage_band=None):
    """Spectrum of ``F(t) = <kappa f, exp(iHt) kappa g>``.

    ``F`` is sampled on a uniform grid resolving twice the largest frequency,
    tapered by a Gaussian of width ``samples/16`` and transformed with the
    ``exp(-i k t)`` convention, so ``exp(i omega t)`` sits at ``+omega``.

    Returns
    -------
    dict
        ``frequencies`` (angular), ``magnitudes``, ``times``, ``samples`` of F,
        ``negative_mass_ratio`` (magnitude mass below ``-leakage_band`` over
        total mass).
    """
    kf = f if isinstance(f, KreinVector) else kappa(f, structure)
    kg = g if isinstance(g, KreinVector) else kappa(g, structure)
    om = np.concatenate([structure.omega[0], structure.omega[1]])
    coef = np.conj(kf.array) * kf.signs * kg.array
    return frequency_profile(coef, om, samples, leakage_band)


def frequency_profile(coef, omega, samples=1024, leakage_band=None):
    """Tapered spectrum of ``F(t) = sum_k coef_k exp(i omega_k t)``; see ``positive_frequency_spectrum``."""
    wmax, wmin = float(omega.max()), float(omega.min())
    dt = np.pi / (2.0 * wmax)
    n = np.arange(samples) - samples // 2
    times = n * dt
    F = np.exp(1j * np.outer(times, omega)) @ coef
    window = np.exp(-0.5 * (n / (samples / 16.0)) ** 2)
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(F * window)))
    freqs = np.fft.fftshift(np.fft.fftfreq(samples, d=dt)) * 2.0 * np.pi
    mags = np.abs(spec)
    band = 0.5 * wmin if leakage_band is None else leakage_band
    total = mags.sum()
    neg = mags[freqs < -band].sum()
    return {
        "frequencies": freqs,
        "magnitudes": mags,
        "times": times,
        "samples": F,
        "negative_mass_ratio": float(neg / total) if total > 0 else 0.0,
    }


def extend_kappa(f, window, structure):
    """``kappa(g)`` for the slab-supported ``g`` of the time-slice reduction."""
    g, _ = timeslice_reduce(f, window, "plain", structure.grid)
    return kappa(g, structure)


def harmonic_dual_form(y, structure):
    """Time-constant 1-form whose spatial part is the harmonic form of ``y``.

    ``y`` must lie in ``Y`` with no scalar component.
    """
    k0 = structure.kernel[0].size
    if np.any(np.abs(y.value) > 0) or np.any(np.abs(y.velocity[:k0]) > 0):
        raise DomainError("harmonic dual forms are defined for the 1-form block of Y only")
    cx = structure.complex
    val = {"t": np.zeros(cx.cochain_dims[0]), "x": np.zeros(cx.cochain_dims[1])}
    val["x"][structure.kernel[1]] = y.velocity[k0:]
    vel = {"t": np.zeros(cx.cochain_dims[0]), "x": np.zeros(cx.cochain_dims[1])}
    return SolutionForm(cx, ModeCoefficients(1, val, vel, 0.0), structure.grid.half_width)


def dual_pairing(F, f, structure):
    return lorentz_pairing(F, f, structure.grid)
