"""Portable seeded random stream.

xoshiro256** (Blackman & Vigna) with its 256-bit state filled from a
splitmix64 sequence started at the seed.  Uniform doubles take the top 53
bits; normal variates come from the Box-Muller transform, both outputs of a
pair being used in turn.  The integer arithmetic is exact, so the stream is
identical on every platform.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
TWO_PI = 2.0 * math.pi


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class Xoshiro256:
    def __init__(self, seed: int = 0, state: tuple[int, int, int, int] | None = None):
        if state is None:
            sm = int(seed) & MASK64
            s = []
            for _ in range(4):
                sm, out = splitmix64(sm)
                s.append(out)
            state = tuple(s)
        if not any(state):
            raise ValueError("xoshiro256 state must not be all zero")
        self._s = [int(x) & MASK64 for x in state]
        self._spare: float | None = None

    @property
    def state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform double in ``[0, 1)``."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float, high: float, size: int) -> np.ndarray:
        return np.array([low + (high - low) * self.random() for _ in range(size)])

    def gauss(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.random()  # (0, 1], keeps the log finite
        u2 = self.random()
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare = radius * math.sin(TWO_PI * u2)
        return radius * math.cos(TWO_PI * u2)

    def standard_normal(self, size: int) -> np.ndarray:
        return np.array([self.gauss() for _ in range(size)])

    def normal(self, mean: float, std: float, size: int) -> np.ndarray:
        return mean + std * self.standard_normal(size)
