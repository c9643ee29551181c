"""
Partial-sum encoder of the semi-parallel decoder, and its oracle.

After bits 2m and 2m + 1 are decided, encoder stages 0, 1, ... run while
(m + 1) is a multiple of 2**l. Stage l combines the two most recent 2**l-bit
blocks of ``ps{l}`` into one 2**(l+1)-bit block of ``ps{l+1}``: the left half
is their XOR, the right half a copy of the newer block. That block is exactly
what a stage-(l+1) g activation consumes.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..codebook import bit_reverse, polar_transform
from ..errors import ParameterError
from .memory import MemoryModel, psum_bank


def encoder_node_f(a, b):
    """XOR half of an encoder butterfly."""
    return np.bitwise_xor(a, b)


def encoder_node_g(a):
    """Pass-through half of an encoder butterfly."""
    return a


def partial_sum(cfg, decoded_prefix: Sequence[int], l: int, j: int) -> int:
    """
    Reference value of the encoder output at stage l, bit-reversed index j.

    This is ``v[bitrev(j)]`` where v is the stage-l re-encoding of the
    decoded bits, i.e. the GF(2) transform of the 2**l-bit block of
    ``decoded_prefix`` that contains leaf ``bitrev(j)``. The whole block must
    already be decoded.
    """
    n = cfg.code.n
    if not 0 <= l <= n:
        raise ParameterError(f"stage {l} out of range for n={n}")
    i = bit_reverse(j, n)
    size = 1 << l
    start = (i >> l) * size
    prefix = np.asarray(decoded_prefix, dtype=np.uint8)
    if prefix.size < start + size:
        raise ParameterError(
            f"partial sum ({l}, {j}) needs bits up to {start + size - 1}, "
            f"only {prefix.size} decoded"
        )
    return int(polar_transform(prefix[start : start + size])[i - start])


class PartialSumEncoder:
    """Drives the ``ps*`` memories; one :meth:`step` is one clock cycle."""

    def __init__(self, memory: MemoryModel):
        self.memory = memory
        self.P = memory.P
        # blocks produced so far into each ps{m}
        self.produced = [0] * memory.n

    def reset(self):
        self.produced = [0] * self.memory.n

    def latest_slot(self, m: int) -> int:
        return (self.produced[m] - 1) % self.memory.psum_slots(m)

    def steps(self, l: int) -> int:
        return max(1, (2 << l) // self.P)

    def read(self, m: int, start: int, width: int) -> np.ndarray:
        """Bits [start, start + width) of the newest block of ps{m}."""
        word, lane = divmod(start, self.P)
        bits = self.memory.read(psum_bank(m, self.latest_slot(m)), word)
        return bits[lane : lane + width]

    def _write(self, m: int, slot: int, start: int, bits: np.ndarray):
        word, lane = divmod(start, self.P)
        self.memory.write(psum_bank(m, slot), word, bits, lane)

    def step(self, l: int, c: int, pair: Optional[Sequence[int]] = None):
        """
        Cycle c of encoder stage l. Stage 0 takes the freshly decided pair
        directly from the PE outputs.
        """
        pairs = 1 << l
        per = min(pairs, self.P // 2)
        first = c * per
        dst = l + 1
        dst_slot = self.produced[dst] % self.memory.psum_slots(dst)
        if l == 0:
            left = np.array([pair[0]], dtype=np.uint8)
            right = np.array([pair[1]], dtype=np.uint8)
        else:
            newer = self.latest_slot(l)
            older = (self.produced[l] - 2) % self.memory.psum_slots(l)
            word, lane = divmod(first, self.P)
            left = self.memory.read(psum_bank(l, older), word)[lane : lane + per]
            right = self.memory.read(psum_bank(l, newer), word)[lane : lane + per]
        self._write(dst, dst_slot, first, encoder_node_f(left, right))
        self._write(dst, dst_slot, pairs + first, encoder_node_g(right))
        if c == self.steps(l) - 1:
            self.produced[dst] += 1
