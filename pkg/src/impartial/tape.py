"""Seeded, vertex-keyed randomness for the mechanisms.

Every coin is a function of ``(seed, trial, purpose, vertex)`` only.  Each
purpose gets its own counter-based Philox stream whose key is derived from a
``SeedSequence``; the ``v``-th uniform of a stream is the ``v``-th output of a
fresh generator, so it does not depend on how many vertices the graph has or
on which arcs it contains.  Replaying a tape on a graph whose only difference
is one vertex's votes therefore gives every other vertex the same coins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PERMUTATION = 0
SAMPLE = 1
REVEAL = 2
PARTITION = 3
FALLBACK = 4


@dataclass(frozen=True)
class RandomTape:
    seed: int
    trial: int = 0
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def generator(self, purpose: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.trial, purpose))
        key = ss.generate_state(2, dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def uniforms(self, purpose: int, n: int) -> np.ndarray:
        """Uniforms in [0, 1); entry ``v`` depends only on the seed, purpose and ``v``."""
        k = ("u", purpose, n)
        if k not in self._cache:
            u = self.generator(purpose).random(n)
            u.flags.writeable = False
            self._cache[k] = u
        return self._cache[k]

    def sample_coins(self, n: int, eps: float) -> np.ndarray:
        return self.uniforms(SAMPLE, n) < eps

    def reveal_coins(self, n: int, eps: float) -> np.ndarray:
        return self.uniforms(REVEAL, n) < 1.0 - eps

    def partition_coins(self, n: int) -> np.ndarray:
        """``True`` puts the vertex in the voting group V1."""
        return self.uniforms(PARTITION, n) < 0.5

    def permutation(self, n: int) -> np.ndarray:
        # Generator.permutation is a Fisher-Yates shuffle
        k = ("perm", n)
        if k not in self._cache:
            p = self.generator(PERMUTATION).permutation(n)
            p.flags.writeable = False
            self._cache[k] = p
        return self._cache[k]

    def fallback_order(self, n: int) -> np.ndarray:
        """Uniformly random ordering of the vertices used for fallback picks."""
        k = ("fb", n)
        if k not in self._cache:
            p = self.generator(FALLBACK).permutation(n)
            p.flags.writeable = False
            self._cache[k] = p
        return self._cache[k]
