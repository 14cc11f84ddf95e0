"""Seeded random source shared by the compiled and pure-Python kernels.

Both kernels consume raw 64-bit words from one numpy ``PCG64`` bit generator
and map them to draws the same way, so a seed yields the same trajectory
whichever backend runs it:

* integer in ``[0, n)``: Lemire's multiply-shift, ``(word * n) >> 64``, redrawing
  while the low 64 bits of the product fall below ``2**64 % n``
* coin with probability ``p``: ``(word >> 11) * 2**-53 < p``
"""

from __future__ import annotations

import numpy as np

_TWO64 = 1 << 64
_MASK = _TWO64 - 1
_INV53 = 1.0 / 9007199254740992.0


class RandomSource:
    """Deterministic stream built from a 64-bit seed."""

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < _TWO64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
        self.seed = seed
        self.bitgen = np.random.PCG64(seed)

    def words(self, chunk: int = 4096) -> WordStream:
        return WordStream(self.bitgen, chunk)


class WordStream:
    """Buffered reader over a bit generator.

    Words are pulled ahead in chunks for speed; :meth:`close` rewinds the bit
    generator so that exactly the consumed words count as used.
    """

    def __init__(self, bitgen: np.random.PCG64, chunk: int = 4096):
        self._bitgen = bitgen
        self._start = bitgen.state
        self._chunk = chunk
        self._buf: list[int] = []
        self._pos = 0
        self._fetched = 0

    def next(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._bitgen.random_raw(self._chunk).tolist()
            self._fetched += self._chunk
            self._pos = 0
        x = self._buf[self._pos]
        self._pos += 1
        return x

    def below(self, n: int) -> int:
        m = self.next() * n
        if (m & _MASK) < n:
            threshold = _TWO64 % n
            while (m & _MASK) < threshold:
                m = self.next() * n
        return m >> 64

    def coin(self, p: float) -> bool:
        return (self.next() >> 11) * _INV53 < p

    @property
    def consumed(self) -> int:
        return self._fetched - len(self._buf) + self._pos

    def close(self) -> None:
        used = self.consumed
        self._bitgen.state = self._start
        if used:
            self._bitgen.advance(used)
        self._start = self._bitgen.state
        self._buf = []
        self._pos = 0
        self._fetched = 0

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
