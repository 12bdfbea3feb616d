# src/numeric/domain/services/random.py
"""Seeded, splittable random streams.

Algorithm
---------
Every stream is ``numpy.random.Generator(PCG64(SeedSequence(seed, spawn_key)))``.

* ``seed`` is the user-facing 64-bit integer (reduced modulo 2**64).
* ``spawn_key`` is the path of splits taken from the root stream. A string
  split contributes ``zlib.crc32(name.encode("utf-8"))``; an integer split
  (episode index, worker index) contributes the integer itself.
* ``SeedSequence`` hashes (seed, spawn_key) into the PCG64 state with the
  published SeedSequence mixing function, so any implementation of PCG64 and
  SeedSequence reproduces the same streams bit for bit.

Two streams with different paths are statistically independent; the same path
always yields the same stream, regardless of which other streams were drawn.
"""

import zlib

import numpy as np

from src.shared.domain.exceptions.base import ValidationException

_SEED_MASK = (1 << 64) - 1


def _path_key(part: str | int) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part < 0:
        raise ValidationException(f"Integer split keys must be non-negative, got {part}")
    return part


class SeedStream:
    """A node in the tree of random streams rooted at one seed."""

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = seed & _SEED_MASK
        self.path = path

    def split(self, *parts: str | int) -> "SeedStream":
        """Child stream for a named module or an indexed item."""
        return SeedStream(self.seed, self.path + tuple(_path_key(p) for p in parts))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self) -> str:
        return f"SeedStream(seed={self.seed}, path={self.path})"
