"""Deterministic 64-bit PRNG for workload generation and fuzz loops.

splitmix64 produces the same stream for the same seed on every platform,
so generated workloads and sampled test states are reproducible exactly.
"""

from .errors import InputError

_MASK = (1 << 64) - 1


class SplitMix64:
    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def below(self, n: int) -> int:
        """Uniform-ish integer in [0, n); modulo bias is negligible for n << 2**64."""
        if n <= 0:
            raise InputError(f"below() needs a positive bound, got {n}")
        return self.next_u64() % n

    def randint(self, lo: int, hi: int) -> int:
        """Inclusive range."""
        if hi < lo:
            raise InputError(f"empty range [{lo}, {hi}]")
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        if not seq:
            raise InputError("choice() on empty sequence")
        return seq[self.below(len(seq))]
