"""Seeded, mode-limited test forms.

Test forms are built from a fixed finite set of spatial eigenforms so that
their one-particle images stay inside a small Krein subspace:

* ``k`` scalar eigenforms ``e_a`` (non-kernel),
* the exact 1-forms ``d e_a / sqrt(lambda_a)``,
* ``j`` co-exact 1-forms ``delta beta_b / sqrt(mu_b)`` from 2-form eigenforms,
* harmonic 1-forms and the constant scalar (zero modes only).

Every spatial form is mass-normalized, so the generating Krein vectors are
unit coordinate directions up to rotations inside degenerate clusters.
"""

from __future__ import annotations

import numpy as np

from .one_particle import KreinVector
from .spacetime_forms import (
    SmoothBump,
    SpacetimeForm,
    make_test_form,
    st_codifferential,
    st_exterior_derivative,
)
from .spatial_complex import SpatialForm

__all__ = ["ModeCorpus"]


class ModeCorpus:
    """Random test forms over a fixed mode set.

    Parameters
    ----------
    structure : OneParticleStructure
    scalar_modes : int
        Number ``k`` of scalar eigenforms.
    coexact_modes : int
        Number ``j`` of co-exact 1-forms (0 in one dimension).
    center_range, width_range : tuple
        Ranges for bump centers and half-widths.
    """

    def __init__(self, structure, scalar_modes=2, coexact_modes=2,
                 center_range=(-1.2, 1.2), width_range=(0.6, 1.0)):
        cx = structure.complex
        self.structure = structure
        self.complex = cx
        self.center_range = center_range
        self.width_range = width_range
        b0, b1 = structure.bases[0], structure.bases[1]
        p0 = structure.perp[0][:scalar_modes]
        self.scalar = [b0.vectors[:, i] for i in p0]
        self.scalar_lam = [float(b0.eigenvalues[i]) for i in p0]
        self.exact = [cx.d[0] @ e / np.sqrt(lam) for e, lam in zip(self.scalar, self.scalar_lam)]
        self.coexact = []
        if cx.dimension >= 2 and coexact_modes > 0:
            b2 = cx.eigenbasis(2)
            for i in b2.perp_indices[:coexact_modes]:
                beta = b2.vectors[:, i]
                self.coexact.append(cx.codiff_matrix(2) @ beta / np.sqrt(b2.eigenvalues[i]))
            self.two_forms = [b2.vectors[:, i] for i in b2.perp_indices[:coexact_modes]]
        else:
            self.two_forms = []
        self.harmonic = [b1.vectors[:, i] for i in structure.kernel[1]]
        self.constant = [b0.vectors[:, i] for i in structure.kernel[0]]

    @property
    def m(self):
        return len(self.scalar) + len(self.exact) + len(self.coexact)

    def generators(self):
        """Krein vectors spanning every ``kappa`` of the corpus."""
        s = self.structure
        b0, b1 = s.bases[0], s.bases[1]
        out = []
        for e in self.scalar:
            c = b0.coefficients(e)[s.perp[0]].astype(complex)
            out.append(KreinVector(s, c, np.zeros(s.dims[1], complex)))
        for w in self.exact + self.coexact:
            c = b1.coefficients(w)[s.perp[1]].astype(complex)
            out.append(KreinVector(s, np.zeros(s.dims[0], complex), c))
        return out

    # random pieces -------------------------------------------------------------

    def profile(self, rng):
        return SmoothBump(float(rng.uniform(*self.center_range)), float(rng.uniform(*self.width_range)),
                          float(rng.uniform(0.5, 1.5)))

    def _sf(self, degree, vec, rng):
        return SpatialForm(self.complex, degree, float(rng.normal()) * vec)

    def scalar_form(self, rng, mean_zero=True):
        """``phi = sum p_a(t) e_a`` (plus a constant mode unless ``mean_zero``)."""
        blocks = [(self.profile(rng), self._sf(0, e, rng)) for e in self.scalar]
        if not mean_zero:
            blocks += [(self.profile(rng), self._sf(0, e, rng)) for e in self.constant]
        return make_test_form(0, blocks)

    def exact_form(self, rng):
        return st_exterior_derivative(self.scalar_form(rng))

    def two_form(self, rng, harmonic=True):
        ones = self.exact + self.coexact + (self.harmonic if harmonic else [])
        blocks = [(self.profile(rng), self._sf(1, w, rng)) for w in ones]
        blocks += [(self.profile(rng), self._sf(2, beta, rng)) for beta in self.two_forms]
        return make_test_form(2, blocks)

    def coclosed_form(self, rng, harmonic=True):
        return st_codifferential(self.two_form(rng, harmonic))

    def generic_form(self, rng, harmonic=True, constant=False):
        t_vecs = self.scalar + (self.constant if constant else [])
        x_vecs = self.exact + self.coexact + (self.harmonic if harmonic else [])
        blocks = [(self.profile(rng), self._sf(0, e, rng)) for e in t_vecs]
        blocks += [(self.profile(rng), self._sf(1, w, rng)) for w in x_vecs]
        return make_test_form(1, blocks)

    def harmonic_free_form(self, rng):
        return self.generic_form(rng, harmonic=False, constant=False)

    def gauge_function(self, rng, mean_zero=True):
        return self.scalar_form(rng, mean_zero=mean_zero)

    def draw(self, kind, rng):
        return {
            "generic": self.generic_form,
            "coclosed": self.coclosed_form,
            "exact": self.exact_form,
            "harmonic_free": self.harmonic_free_form,
        }[kind](rng)

    @staticmethod
    def is_analytic(f):
        return isinstance(f, SpacetimeForm)
