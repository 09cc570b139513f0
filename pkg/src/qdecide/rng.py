"""Buffered uniform sampling over a numpy Generator.

Training loops draw one uniform float per step; pulling them from a
pre-filled block amortizes the generator call overhead while keeping the
stream a pure function of the seed.  The wrapper exposes the same
``random()`` method as the generator itself, so samplers accept either.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RandomStream"]


class RandomStream:
    """Draws uniforms from ``rng`` in fixed-size blocks."""

    BLOCK = 8192

    def __init__(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self._buffer = rng.random(self.BLOCK).tolist()
        self._index = 0

    def random(self) -> float:
        index = self._index
        if index >= self.BLOCK:
            self._buffer = self._rng.random(self.BLOCK).tolist()
            index = 0
        self._index = index + 1
        return self._buffer[index]
