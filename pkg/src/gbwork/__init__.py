"""Numerical workbench for Gupta-Bleuler quantization on ultrastatic lattices.

The package is organised bottom-up:

spatial_complex
    flat-torus cochain complex, Hodge stars, Laplacian spectra
spacetime_forms
    test forms on R x Sigma with analytic time profiles
wave_kernel
    mode-wise Green operators, commutator pairing, symplectic form
one_particle
    Krein space, the one-particle map, zero modes, energy
fock_krein
    truncated Krein-Fock space with a Hermite zero-mode sector
algebra_gauge
    normal-ordered field algebra, gauge maps, gauge-parameter operators
brst_states
    scalar one-particle map and the BRST two-point functions
corpus
    seeded test forms over a fixed mode set
config, model, suites, report, cli
    configuration schema, cached model, named checks and the ``workbench`` command

Importing the package does not import numpy; submodules are loaded on demand.
"""

__version__ = "0.1.0"
