"""Counter-based splitmix64 stream, vectorized with numpy uint64 arithmetic."""

from __future__ import annotations

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


class SplitMix64:
    """splitmix64 generator; output k is mix(seed + (k+1) * GOLDEN_GAMMA) mod 2^64."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.position = 0

    def next_block(self, count: int) -> np.ndarray:
        k = np.arange(self.position + 1, self.position + count + 1, dtype=np.uint64)
        self.position += count
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + k * np.uint64(GOLDEN_GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    def next_u64(self) -> int:
        return int(self.next_block(1)[0])

    def integers(self, low: np.ndarray, high: np.ndarray, rows: int) -> np.ndarray:
        """``rows`` draws of a vector uniform on the box [low, high] (inclusive).

        Uses the raw word modulo the range; the bias is below 2^-40 for any
        range that fits a desk-scale box.
        """
        low = np.asarray(low, dtype=np.int64)
        span = (np.asarray(high, dtype=np.int64) - low + 1).astype(np.uint64)
        words = self.next_block(rows * low.size).reshape(rows, low.size)
        return (words % span).astype(np.int64) + low

    def uniform(self, count: int) -> np.ndarray:
        """Floats in [0, 1) from the top 53 bits."""
        return (self.next_block(count) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def derive_seed(seed: int, stream: int) -> int:
    """Independent child seed for a numbered purpose (shifts, probes, ...)."""
    g = SplitMix64(seed)
    g.position = int(stream) * 2
    return g.next_u64()
