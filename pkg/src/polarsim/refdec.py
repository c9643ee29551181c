"""
Golden-model successive-cancellation decoders.

The recursion follows the natural-order decoding tree of ``x = u F_N``: a node
holding 2M LLRs computes its left child with f over the pairs (j, j + M), its
right child with g using the left child's re-encoded bits, and returns its own
re-encoded bits to its parent. Leaves are visited in ascending index order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .codebook import PolarCode
from .errors import ParameterError
from .numerics import (
    FxLLR,
    QuantScheme,
    f_minsum_array,
    f_spa_array,
    g_array,
    hard_decision_array,
)

logger = logging.getLogger(__name__)

VARIANTS = ("SPA_float", "MSA_float", "MSA_fixed")


@dataclass(frozen=True)
class DecodeAlgo:
    variant: str
    scheme: Optional[QuantScheme] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown decoder variant {self.variant!r}")
        if self.variant == "MSA_fixed" and not isinstance(self.scheme, QuantScheme):
            raise ParameterError("MSA_fixed needs a QuantScheme")

    @property
    def fixed_point(self) -> bool:
        return self.variant == "MSA_fixed"

    @classmethod
    def spa(cls) -> "DecodeAlgo":
        return cls("SPA_float")

    @classmethod
    def msa(cls) -> "DecodeAlgo":
        return cls("MSA_float")

    @classmethod
    def msa_fixed(cls, scheme: QuantScheme) -> "DecodeAlgo":
        return cls("MSA_fixed", scheme)

    def __str__(self):
        if self.fixed_point:
            return f"MSA {self.scheme}"
        return "SPA float" if self.variant == "SPA_float" else "MSA float"


class SCDecoder:
    """Successive-cancellation decoder bound to one code and one arithmetic."""

    def __init__(self, code: PolarCode, algo: DecodeAlgo):
        self.code = code
        self.algo = algo
        self._frozen_prefix = np.concatenate([[0], np.cumsum(code.frozen_mask)])
        self._f = f_spa_array if algo.variant == "SPA_float" else f_minsum_array
        self._max_raw = algo.scheme.max_raw if algo.fixed_point else None

    def _prepare(self, llrs) -> np.ndarray:
        if self.algo.fixed_point:
            if isinstance(llrs, (list, tuple)) and llrs and isinstance(llrs[0], FxLLR):
                arr = np.array([x.raw for x in llrs], dtype=np.int32)
            else:
                arr = np.asarray(llrs)
            if not np.issubdtype(arr.dtype, np.integer):
                raise ParameterError("MSA_fixed expects channel-quantized raw integers")
            bound = self.algo.scheme.max_raw_channel
            if np.abs(arr).max(initial=0) > bound:
                raise ParameterError(
                    f"channel LLRs exceed Qc = {self.algo.scheme.qc} bits"
                )
            # sign extension into the Q-bit internal format is value-preserving
            arr = arr.astype(np.int32)
        else:
            arr = np.asarray(llrs, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.code.N:
            raise ParameterError(
                f"expected {self.code.N} channel LLRs per frame, got shape {arr.shape}"
            )
        return arr

    def decode(self, llrs) -> np.ndarray:
        """Decode one frame; returns the length-N estimate u_hat."""
        return self.decode_batch(llrs)[0]

    def decode_batch(self, llrs) -> np.ndarray:
        """Decode a (B, N) block of frames; returns (B, N) estimates."""
        arr = self._prepare(llrs)
        u_hat = np.zeros(arr.shape, dtype=np.uint8)
        self._node(arr, 0, u_hat)
        return u_hat

    def _all_frozen(self, offset: int, size: int) -> bool:
        return self._frozen_prefix[offset + size] - self._frozen_prefix[offset] == size

    def _node(self, llr: np.ndarray, offset: int, u_hat: np.ndarray) -> np.ndarray:
        size = llr.shape[1]
        if self._all_frozen(offset, size):
            # frozen decisions never depend on the LLRs
            return np.zeros_like(u_hat[:, :size])
        if size == 1:
            bits = hard_decision_array(llr[:, 0])
            u_hat[:, offset] = bits
            return bits[:, None]

        half = size // 2
        a, b = llr[:, :half], llr[:, half:]
        x_left = self._node(self._f(a, b), offset, u_hat)
        right = g_array(x_left, a, b, self._max_raw)
        x_right = self._node(right, offset + half, u_hat)
        return np.concatenate([x_left ^ x_right, x_right], axis=1)


def sc_decode(code: PolarCode, channel_llrs, algo: DecodeAlgo) -> np.ndarray:
    """Functional form of :meth:`SCDecoder.decode`."""
    return SCDecoder(code, algo).decode(channel_llrs)


def extract_info(code: PolarCode, u_hat: Sequence[int]) -> np.ndarray:
    """Select the unfrozen positions of an estimate, in decoding order."""
    u_hat = np.asarray(u_hat, dtype=np.uint8)
    if u_hat.shape[-1] != code.N:
        raise ParameterError(f"estimate must have {code.N} bits, got {u_hat.shape[-1]}")
    return u_hat[..., code.info_positions]

