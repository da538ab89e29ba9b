"""Portable SplitMix64 random streams.

Every random decision in the package (network sampling, fault sequences,
tie-breaks, enhancement picks) draws from a :class:`SplitMix64` stream.
The generator is tiny and fully specified, so any implementation can
reproduce the same trials bit for bit:

    state  <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2**64)
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB  (mod 2**64)
    output <- z ^ (z >> 31)

Bounded draws use the top 32 bits: ``randbelow(n) = ((x >> 32) * n) >> 32``.

Child streams are derived with ``derive_seed(seed, k) =
mix64(mix64(seed) ^ (k * GOLDEN + GOLDEN))`` where ``mix64`` is the output
function above applied to its argument directly.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Derive a child seed from ``seed`` along an integer path."""
    s = seed & MASK64
    for k in path:
        s = mix64(mix64(s) ^ ((k * GOLDEN + GOLDEN) & MASK64))
    return s


class SplitMix64:
    """Sequential SplitMix64 stream."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        if n >= 1 << 32:
            raise ValueError("randbelow supports n < 2**32")
        return ((self.next_u64() >> 32) * n) >> 32

    def choice(self, items):
        return items[self.randbelow(len(items))]
