"""Scalar one-particle map and the paired two-point functions.

The scalar map is ``kappa0(f) = Delta^{1/4} f_0 + i Delta^{-1/4} fdot_0`` with
``(f_0, fdot_0)`` the Cauchy data at ``t = 0`` of the Pauli-Jordan solution of
the scalar source.  On the torus the constant function is harmonic, so every
scalar source must be mean-zero in the sense that its solution has no
constant component.

Normalizations match the vector representation:

    omega1(f, g) = <Omega, A(f) A(g) Omega> = conj<kappa f, kappa g>/2 + omega_Z(f, g)
    omega0(f, g) = conj<kappa0 f, kappa0 g>/2

and ``G0 = -G_scalar`` where ``G_scalar`` is the retarded-minus-advanced
pairing of ``delta d = -d_t^2 - Delta`` on functions.  With these choices

    omega0(f, g) - omega0(g, f) = -i G0(f, g)
    omega0(delta f, g)          = -omega1(f, d g)
    G(f, d g)                   = -G0(delta f, g).
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, SingularityError
from .one_particle import LEAKAGE_TOL, frequency_profile, gz_form, kappa, krein_inner
from .spacetime_forms import st_box, st_codifferential, st_exterior_derivative
from .wave_kernel import g_pairing, pauli_jordan

__all__ = [
    "kappa0",
    "scalar_inner",
    "green0",
    "BrstPair",
    "brst_compatibility_suite",
    "kappa0_frequency_profile",
]

NORMALIZATION = "omega1 = <Omega, A(f) A(g) Omega> = conj<kappa f, kappa g>/2 + omega_Z; omega0 = conj<kappa0 f, kappa0 g>/2"


def kappa0(f, structure):
    """Scalar one-particle vector over non-constant modes.

    Raises
    ------
    SingularityError
        If the solution has a constant-mode component above ``1e-8``.
    """
    if f.degree != 0:
        raise DomainError("kappa0 acts on functions")
    sol = pauli_jordan(f, structure.grid)
    a, v = sol.modes.value["s"], sol.modes.velocity["s"]
    ker = structure.kernel[0]
    leak = max(np.abs(a[ker]).max(initial=0.0), np.abs(v[ker]).max(initial=0.0))
    if leak > LEAKAGE_TOL:
        raise SingularityError(f"constant-mode component {leak:.3e}; scalar sources must be mean-zero")
    p = structure.perp[0]
    return structure.up[0] * a[p] + 1j * structure.down[0] * v[p]


def scalar_inner(u, v):
    """``<u, v>``, conjugate-linear in ``u``."""
    return complex(np.vdot(u, v))


def green0(f, g, structure):
    """``G0(f, g) = -G_scalar(f, g)``."""
    return -g_pairing(f, g, structure.grid)


class BrstPair:
    """Evaluators ``omega0`` and ``omega1`` over a Gupta-Bleuler space.

    Parameters
    ----------
    space : GBSpace
        Representation used for ``omega1``; its gauge function is irrelevant
        for vacuum expectation values of products of two fields only when it
        is absent, so a gauge-free space is expected.
    """

    normalization = NORMALIZATION

    def __init__(self, space):
        if space.gauge is not None:
            raise DomainError("omega1 is evaluated in the gauge-free representation")
        self.space = space
        self.structure = space.structure

    def omega0(self, f, g):
        s = self.structure
        return 0.5 * np.conj(scalar_inner(kappa0(f, s), kappa0(g, s)))

    def omega1(self, f, g):
        sp = self.space
        return complex(sp.n_point(None, [sp.field_operator(f), sp.field_operator(g)]))

    def omega1_closed(self, f, g):
        """``conj<kappa f, kappa g>/2 + omega_Z`` without the Fock space."""
        s = self.structure
        _, af, bf, _ = self.space.field_data(f)
        _, ag, bg, _ = self.space.field_data(g)
        wz = 0.5 * np.sum((af + 1j * bf) * (ag - 1j * bg))
        return 0.5 * np.conj(krein_inner(kappa(f, s), kappa(g, s))) + wz


def brst_compatibility_suite(pair, corpus, rng, pairs=20):
    """Residuals of the seven compatibility conditions plus the classical identity.

    Scalar tests are mean-zero; 1-form tests carry harmonic components but no
    constant time component, so ``delta f`` stays mean-zero.

    Returns
    -------
    dict
        Condition name -> worst residual (for positivity conditions, the most
        negative value clipped at zero, reported as a positive number).
    """
    s = pair.structure
    out = {k: 0.0 for k in (
        "omega1_box", "omega0_box", "omega1_antisymmetry", "omega0_antisymmetry",
        "cross_relation", "omega1_positivity", "omega0_positivity", "classical_identity")}

    def bump(key, val):
        out[key] = max(out[key], float(val))

    for _ in range(pairs):
        f, g = corpus.generic_form(rng), corpus.generic_form(rng)
        phi, psi = corpus.scalar_form(rng), corpus.scalar_form(rng)
        bump("omega1_box", max(abs(pair.omega1(st_box(f), g)), abs(pair.omega1(f, st_box(g)))))
        bump("omega0_box", max(abs(pair.omega0(st_box(phi), psi)), abs(pair.omega0(phi, st_box(psi)))))
        G1 = g_pairing(f, g, s.grid)
        bump("omega1_antisymmetry", abs(pair.omega1(f, g) - pair.omega1(g, f) + 1j * G1))
        G0 = green0(phi, psi, s)
        bump("omega0_antisymmetry", abs(pair.omega0(phi, psi) - pair.omega0(psi, phi) + 1j * G0))
        df, dpsi = st_codifferential(f), st_exterior_derivative(psi)
        bump("cross_relation", abs(pair.omega0(df, psi) + pair.omega1(f, dpsi)))
        bump("classical_identity", abs(g_pairing(f, dpsi, s.grid) + green0(df, psi, s)))
        h = corpus.coclosed_form(rng)
        bump("omega1_positivity", max(0.0, -pair.omega1(h, h).real))
        bump("omega0_positivity", max(0.0, -pair.omega0(phi, phi).real))
    return out


def kappa0_frequency_profile(f, g, structure, samples=1024):
    """Spectrum of ``t -> <kappa0 f, exp(i Delta^{1/2} t) kappa0 g>``."""
    kf, kg = kappa0(f, structure), kappa0(g, structure)
    om = structure.omega[0]
    return frequency_profile(np.conj(kf) * kg, om, samples)


def harmonic_defect(f, g, structure):
    """``G(f, g) - Im<kappa f, kappa g> - G_Z(f, g)`` (vanishes identically)."""
    return g_pairing(f, g, structure.grid) - krein_inner(kappa(f, structure), kappa(g, structure)).imag - gz_form(f, g, structure)
