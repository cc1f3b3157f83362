"""Buffered, counter-based random source used by the growth process.

Every draw is a raw 64-bit word from a Philox4x64 stream. Words are
converted to decisions without rejection, so the number of words a step
consumes never depends on the outcome:

* a vertex draw from a pool of size ``n`` uses one word ``w`` and returns
  index ``(w * n) >> 64``;
* a coin of parameter ``p`` uses one word and is heads iff ``w < floor(p * 2**64)``.

A growth step with parameter ``m`` consumes exactly ``2m - 1`` words:
one for the first endpoint, then a (coin, vertex) pair for each of the
remaining ``m - 1`` endpoints. The vertex word is consumed even when the
coin outcome makes it irrelevant to a particular branch.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 1 << 16
_MAX_SEED = (1 << 64) - 1


def coin_threshold(p: float) -> int:
    """Integer threshold such that ``word < threshold`` has probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return int(p * (1 << 64))


class HkRng:
    """Deterministic stream of 64-bit words keyed by a 64-bit seed."""

    __slots__ = ("seed", "_bitgen", "_buf", "_pos")

    def __init__(self, seed: int, *, _bitgen: np.random.Philox | None = None):
        if not isinstance(seed, (int, np.integer)) or not 0 <= seed <= _MAX_SEED:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
        self.seed = int(seed)
        self._bitgen = _bitgen if _bitgen is not None else np.random.Philox(self.seed)
        self._buf: list[int] = []
        self._pos = 0

    def _refill(self, need: int) -> None:
        rest = self._buf[self._pos:]
        self._buf = rest + self._bitgen.random_raw(max(_BLOCK, need)).tolist()
        self._pos = 0

    def word(self) -> int:
        if self._pos >= len(self._buf):
            self._refill(1)
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def words(self, k: int) -> list[int]:
        pos = self._pos
        if pos + k > len(self._buf):
            self._refill(k)
            pos = 0
        self._pos = pos + k
        return self._buf[pos:pos + k]

    def below(self, n: int) -> int:
        """Index uniform on ``range(n)`` from one word."""
        return (self.word() * n) >> 64

    def jumped(self, jumps: int = 1) -> "HkRng":
        """An independent stream, ``jumps * 2**128`` draws ahead of this seed's start."""
        return HkRng(self.seed, _bitgen=np.random.Philox(self.seed).jumped(jumps))
