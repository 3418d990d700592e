"""SplitMix64: a 64-bit splittable generator with a published transition.

    state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9       (mod 2^64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB       (mod 2^64)
    output z ^ (z >> 31)

Fixed here (rather than taken from ``random``) so generated benchmarks
are byte-identical across Python versions and other implementations.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & _MASK
        z = ((z ^ (z >> 27)) * MIX2) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection; ``n`` may exceed 2^64,
        in which case several outputs are concatenated (first one highest)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        words = max(1, -(-n.bit_length() // 64))
        span = 1 << (64 * words)
        limit = span - span % n
        while True:
            r = 0
            for _ in range(words):
                r = (r << 64) | self.next_u64()
            if r < limit:
                return r % n

    def split(self) -> "SplitMix64":
        """Independent child stream seeded by the next output."""
        return SplitMix64(self.next_u64())
