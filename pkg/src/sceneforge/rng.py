"""Portable deterministic random streams.

Everything random in this package flows through :class:`Stream`, a SplitMix64
generator (Steele, Lea & Flood 2014).  The algorithm is fixed and published so
the same 64-bit seed reproduces the same draws on any platform or in any
reimplementation:

    state  <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z      <- state
    z      <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z      <- (z XOR (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    output <- z XOR (z >> 31)

Substreams are derived by purpose, not by position: ``derive_seed(seed, key)``
hashes the key string with FNV-1a 64, XORs it into the parent seed, and runs
one SplitMix64 step.  Each randomized aspect of an entity (its color, its
material, its position, ...) draws from its own keyed substream, so toggling
one randomization aspect on or off never shifts the draws of any other.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK64
    return h


def _mix(state: int) -> int:
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, key: str) -> int:
    """Child seed for the substream named ``key``."""
    s = ((seed & MASK64) ^ fnv1a64(key.encode("utf-8"))) & MASK64
    return _mix((s + _GOLDEN) & MASK64)


class Stream:
    """SplitMix64 random stream with the draw helpers the engine needs."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def derive(self, key: str) -> "Stream":
        """Independent substream keyed by purpose; does not advance self."""
        return Stream(derive_seed(self._state, key))

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        return _mix(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of mantissa."""
        return (self.next_u64() >> 11) * (2.0**-53)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + int(self.random() * (hi - lo + 1))

    def choice(self, seq):
        if not seq:
            raise ValueError("choice from empty sequence")
        return seq[self.randint(0, len(seq) - 1)]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, high index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), by partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        idx = list(range(n))
        for i in range(k):
            j = self.randint(i, n - 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx[:k]
