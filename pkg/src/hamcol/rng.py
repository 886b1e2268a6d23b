"""Deterministic randomness for the whole package.

Two generators are used, both pinned by name in output metadata:

* ``philox4x64`` (numpy's counter-based Philox bit generator) drives the
  single expensive bulk operation, the Fisher-Yates permutation of all
  vertex pairs.  numpy's ``Generator.permutation`` is a Fisher-Yates
  shuffle in C.
* ``splitmix64`` (implemented below, and mirrored verbatim inside the
  compiled kernels) drives every online decision: greedy color draws,
  orientation coin flips, tie breaks and pool splits.  It is a 64-bit
  splittable stream, cheap enough to re-implement identically in Cython,
  which keeps the compiled and pure backends draw-for-draw identical.

Seed derivation is a documented fold: ``stable_seed(a, b, ...)`` mixes the
parts left to right through the splitmix64 finalizer, so per-trial and
per-stage sub-seeds are reproducible across platforms and versions.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

PRNG_METADATA = {
    "pair_permutation": "philox4x64 (numpy.random.Philox)",
    "decisions": "splitmix64 v1",
    "numpy": np.__version__,
}

# Stream tags for per-stage sub-seeds (see harness.run_pipeline).
STREAM_SCHEDULE = 1
STREAM_COLORING = 2
STREAM_POOLS = 3


def mix64(z: int) -> int:
    """splitmix64 finalizer: a bijective 64-bit mix."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stable_seed(*parts: int) -> int:
    """Fold integer parts into one 64-bit seed. Fixed for all time:
    h <- mix64((h + GOLDEN) xor part), starting from h = 0."""
    h = 0
    for p in parts:
        h = mix64(((h + _GOLDEN) & MASK64) ^ (int(p) & MASK64))
    return h


class SplitMix64:
    """splitmix64 stream with unbiased bounded sampling.

    ``below(k)`` returns a uniform int in [0, k) by rejection; ``k == 1``
    consumes nothing.  The compiled kernels reproduce this loop exactly.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, k: int) -> int:
        if k <= 0:
            raise ValueError("below() needs k >= 1")
        if k == 1:
            return 0
        limit = MASK64 + 1 - ((MASK64 + 1) % k)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % k

    def choice(self, seq):
        return seq[self.below(len(seq))]


def philox_generator(seed: int) -> np.random.Generator:
    """numpy Generator backed by Philox, keyed directly by the 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))
