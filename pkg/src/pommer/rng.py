"""Seeded 64-bit PRNG with a fixed, documented stream discipline.

Board layouts and seed derivation must reproduce bit-exactly across
implementations, so everything random in this package flows through
SplitMix64 rather than a host-language generator.  The full discipline
(mixing constants, bounded-draw rejection rule, shuffle order) is written
down in docs/wire-protocol.md under "Randomness".
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Derive the ``index``-th child seed of ``seed``.

    Equal to the SplitMix64 stream of ``seed`` at position ``index``; used
    for match seed -> episode seed -> per-agent rng seed splitting.
    """
    return mix64((seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


class SplitMix64:
    """The package-wide deterministic RNG.

    next_u64() advances the state by GOLDEN_GAMMA and mixes; bounded draws
    use rejection sampling so the stream consumed depends only on the
    drawn values, never on host integer width.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def randrange(self, n: int) -> int:
        """Uniform int in [0, n); rejection sampling, no modulo bias."""
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        threshold = MASK64 + 1 - ((MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < threshold:
                return u % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform int in [lo, hi] inclusive."""
        return lo + self.randrange(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, descending index order."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items: list, k: int) -> list:
        """First k elements of a shuffled copy (stream cost: full shuffle)."""
        pool = list(items)
        self.shuffle(pool)
        return pool[:k]
