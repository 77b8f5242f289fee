"""Counter-based SplitMix64 stream, reproducible across languages.

Draw number i (0-based, counting every 64-bit word ever taken from the
stream) is

    z = seed + (i + 1) * 0x9E3779B97F4A7C15            (mod 2^64)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9          (mod 2^64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB          (mod 2^64)
    z =  z ^ (z >> 31)

uniform(): (z >> 11) * 2^-53, in [0, 1).
normal(): Box-Muller on consecutive word pairs (u1, u2):
    sqrt(-2 log(1 - u1)) * cos(2 pi u2); one normal per pair.
Arrays are filled in C (row-major) order.
"""
from __future__ import annotations

import math

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, counters) -> np.ndarray:
    z = np.uint64(seed % 2 ** 64) + (np.asarray(counters, dtype=np.uint64) + np.uint64(1)) * GAMMA
    z = (z ^ (z >> np.uint64(30))) * M1
    z = (z ^ (z >> np.uint64(27))) * M2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    def __init__(self, seed: int = 0):
        if int(seed) != seed or seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {seed}")
        self.seed = int(seed)
        self.counter = 0

    def words(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        return splitmix64(self.seed, idx)

    def uniform(self, shape) -> np.ndarray:
        n = int(np.prod(shape))
        u = (self.words(n) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
        return u.reshape(shape)

    def normal(self, shape) -> np.ndarray:
        n = int(np.prod(shape))
        u = (self.words(2 * n) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
        u1, u2 = u[0::2], u[1::2]
        z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * math.pi * u2)
        return z.reshape(shape)
