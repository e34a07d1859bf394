"""Configured model: spatial complex, one-particle data, corpus and spaces.

Every derived object is built lazily and cached, so a suite only pays for
what it uses.  Construction is deterministic given the configuration.
"""

from __future__ import annotations

import zlib
from functools import cached_property

import numpy as np

from .brst_states import BrstPair
from .corpus import ModeCorpus
from .fock_krein import GBSpace, build_fock
from .one_particle import OneParticleStructure
from .spacetime_forms import TimeGrid
from .spatial_complex import build_flat_torus

__all__ = ["Model", "check_rng"]


def check_rng(seed, name):
    """Independent generator for ``(seed, name)``; stable across processes."""
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(key,)))


class Model:
    """Objects shared by the verification suites."""

    def __init__(self, config):
        self.config = config

    @cached_property
    def complex(self):
        s = self.config["spatial"]
        return build_flat_torus(s["dimension"], s["divisions"], s["length"])

    @cached_property
    def grid(self):
        t = self.config["time"]
        return TimeGrid(t["window"], t["samples"])

    @cached_property
    def structure(self):
        return OneParticleStructure(self.complex, self.grid)

    @cached_property
    def corpus(self):
        tr = self.config["truncation"]
        coexact = tr["coexact_modes"] if self.complex.dimension >= 2 else 0
        return ModeCorpus(self.structure, tr["scalar_modes"], coexact)

    @cached_property
    def _fock(self):
        tr = self.config["truncation"]
        return build_fock(self.corpus.generators(), tr["particles"], tr["hermite"])

    @property
    def fock(self):
        return self._fock[0]

    @property
    def hermite(self):
        return self._fock[1]

    @cached_property
    def gauge(self):
        if self.config["gauge"]["kind"] == "none":
            return None
        return self.corpus.gauge_function(check_rng(self.config["seed"], "gauge-function"))

    @cached_property
    def space(self):
        """Representation with the configured gauge function."""
        return GBSpace(self.structure, self.fock, self.hermite, self.gauge)

    @cached_property
    def free_space(self):
        """Representation with ``Lambda = 0``."""
        return GBSpace(self.structure, self.fock, self.hermite, None)

    @cached_property
    def brst(self):
        return BrstPair(self.free_space)

    def rng(self, name):
        return check_rng(self.config["seed"], name)
