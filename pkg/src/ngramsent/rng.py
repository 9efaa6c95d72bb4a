"""Deterministic random number generation.

Everything random in this package (corpus shuffling, weight
initialization, epoch reshuffles) is driven by splitmix64 so that results
are bit-reproducible across runs, platforms, and reimplementations in
other languages.  The generator is deliberately tiny and fully specified
here rather than delegated to a platform RNG whose stream may change
between library versions.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")


class SplitMix64:
    """splitmix64 generator (Steele, Lea & Flood's mixing constants).

    State advances by the 64-bit golden ratio each draw; the output is the
    xor-shift/multiply scramble of the new state.  All arithmetic is
    modulo 2**64.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_u64_array(self, n: int) -> np.ndarray:
        """The next `n` outputs as a uint64 array, identical to `n` calls
        of :meth:`next_u64` but computed vectorized."""
        if n < 0:
            raise ValueError("n must be non-negative")
        with np.errstate(over="ignore"):
            steps = np.arange(1, n + 1, dtype=np.uint64)
            z = np.uint64(self._state) + steps * np.uint64(_GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
        self._state = (self._state + n * _GOLDEN) & _MASK64
        return z

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n).

        Drawn as next_u64() mod n; the modulo bias is below 2**-40 for any
        n that fits realistic corpus or layer sizes.
        """
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def next_float(self) -> float:
        """Uniform float64 in [0, 1) using the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_float_array(self, n: int) -> np.ndarray:
        """The next `n` uniform [0, 1) float64 values, vectorized."""
        return (self.next_u64_array(n) >> np.uint64(11)) * 2.0**-53


def derive_seed(seed: int, stream: int) -> int:
    """Derive an independent child seed from (seed, stream).

    Used to give every training epoch its own shuffle stream without
    touching the stream that initialized the weights.
    """
    mixed = (seed ^ ((stream + 1) * _GOLDEN)) & _MASK64
    return SplitMix64(mixed).next_u64()


def fisher_yates(items: Sequence[T], rng: SplitMix64) -> list[T]:
    """Return a shuffled copy of `items` (modern top-down Fisher-Yates).

    Walks i from len-1 down to 1, swapping position i with a uniform
    j in [0, i].  Consumes exactly len(items)-1 draws from `rng`.
    """
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out
