"""
Polar code construction, non-systematic encoding and frozen-set handling.

Bits are stored as ``numpy.uint8`` arrays. Every vector indexed by ``i`` is in
decoding order: ``u_hat[i]`` is the i-th bit emitted by the SC decoder, and
``frozen_mask[i]`` is the ROM bit read when that decision is taken.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import FrozenMaskFormatError, ParameterError

logger = logging.getLogger(__name__)

MIN_N_LOG2 = 1
MAX_N_LOG2 = 20


@dataclass(frozen=True, eq=False)
class PolarCode:
    """An (N, K) polar code; immutable once built."""

    n: int
    K: int
    frozen_mask: np.ndarray
    info_positions: np.ndarray = field(init=False, repr=False)
    frozen_positions: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not MIN_N_LOG2 <= self.n <= MAX_N_LOG2:
            raise ParameterError(
                f"n must be in [{MIN_N_LOG2}, {MAX_N_LOG2}], got {self.n}"
            )
        if not 0 < self.K <= self.N:
            raise ParameterError(f"K must be in [1, {self.N}], got {self.K}")
        mask = np.asarray(self.frozen_mask, dtype=bool).copy()
        if mask.shape != (self.N,):
            raise ParameterError(
                f"frozen mask must have {self.N} entries, got shape {mask.shape}"
            )
        if int(mask.sum()) != self.N - self.K:
            raise ParameterError(
                f"frozen mask freezes {int(mask.sum())} bits, expected {self.N - self.K}"
            )
        mask.flags.writeable = False
        object.__setattr__(self, "frozen_mask", mask)
        object.__setattr__(self, "info_positions", np.flatnonzero(~mask))
        object.__setattr__(self, "frozen_positions", np.flatnonzero(mask))

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def rate(self) -> Fraction:
        return Fraction(self.K, self.N)

    @property
    def n_frozen(self) -> int:
        return self.N - self.K

    def __eq__(self, other):
        if not isinstance(other, PolarCode):
            return NotImplemented
        return (
            self.n == other.n
            and self.K == other.K
            and np.array_equal(self.frozen_mask, other.frozen_mask)
        )

    def __hash__(self):
        return hash((self.n, self.K, self.frozen_mask.tobytes()))

    def __repr__(self):
        return f"PolarCode(N={self.N}, K={self.K}, R={float(self.rate):.4f})"


def bhattacharyya_parameters(n: int, design_param: float) -> np.ndarray:
    """log z - log(1 - z) of each synthetic channel in decoding order; larger is less reliable."""
    # MSB-first split, matching x = u F_N; log z and log(1 - z) kept apart so
    # extreme channels stay distinguishable
    if not 0.0 < design_param < 1.0:
        raise ParameterError(f"design_param must be in (0, 1), got {design_param}")

    log_z = np.array([math.log(design_param)])
    log_w = np.array([math.log1p(-design_param)])
    for _ in range(n):
        # minus: z' = z (1 + w), w' = w**2 ; plus: z' = z**2, w' = w (1 + z)
        minus_z = log_z + np.log1p(np.exp(log_w))
        minus_w = 2.0 * log_w
        plus_z = 2.0 * log_z
        plus_w = log_w + np.log1p(np.exp(log_z))
        new_z = np.empty(2 * log_z.size)
        new_w = np.empty(2 * log_w.size)
        new_z[0::2], new_z[1::2] = minus_z, plus_z
        new_w[0::2], new_w[1::2] = minus_w, plus_w
        log_z, log_w = new_z, new_w
    return log_z - log_w


def construct_code(n: int, K: int, design_param: float = 0.5) -> PolarCode:
    """Freeze the N - K least reliable synthetic channels."""
    if not MIN_N_LOG2 <= n <= MAX_N_LOG2:
        raise ParameterError(f"n must be in [{MIN_N_LOG2}, {MAX_N_LOG2}], got {n}")
    N = 1 << n
    if not 0 < K <= N:
        raise ParameterError(f"K must be in [1, {N}], got {K}")

    logit = bhattacharyya_parameters(n, design_param)
    # stable sort on -z: least reliable first, lower index first among ties
    order = np.argsort(-logit, kind="stable")
    mask = np.zeros(N, dtype=bool)
    mask[order[: N - K]] = True
    logger.debug("constructed N=%d K=%d with z0=%g", N, K, design_param)
    return PolarCode(n=n, K=K, frozen_mask=mask)


def design_param_from_ebn0(ebn0_db: float, rate: float) -> float:
    """Bhattacharyya parameter of a BPSK/AWGN channel at the given Eb/N0."""
    if not math.isfinite(ebn0_db) or rate <= 0:
        raise ParameterError(f"invalid design point Eb/N0={ebn0_db}, R={rate}")
    return math.exp(-float(rate) * 10.0 ** (ebn0_db / 10.0))


def bit_reverse(j: int, n: int) -> int:
    """Reverse the n-bit binary expansion of j."""
    if n < 0 or not 0 <= j < (1 << n):
        raise ParameterError(f"index {j} out of range for {n} bits")
    r = 0
    for _ in range(n):
        r = (r << 1) | (j & 1)
        j >>= 1
    return r


def bit_reversal_permutation(n: int) -> np.ndarray:
    """Array p with p[j] = bit_reverse(j, n)."""
    idx = np.arange(1 << n)
    out = np.zeros_like(idx)
    for s in range(n):
        out |= ((idx >> s) & 1) << (n - 1 - s)
    return out


def polar_transform(bits: np.ndarray) -> np.ndarray:
    """GF(2) product with F_N along the last axis (its own inverse)."""
    x = np.array(bits, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    if N & (N - 1):
        raise ParameterError(f"length must be a power of two, got {N}")
    lead = x.shape[:-1]
    half = 1
    while half < N:
        view = x.reshape(*lead, N // (2 * half), 2, half)
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return x


def expand(code: PolarCode, u: np.ndarray) -> np.ndarray:
    """Place information bits at unfrozen positions, zeros elsewhere."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != code.K:
        raise ParameterError(f"message length must be {code.K}, got {u.shape[-1]}")
    full = np.zeros(u.shape[:-1] + (code.N,), dtype=np.uint8)
    full[..., code.info_positions] = u
    return full


def encode(code: PolarCode, u: np.ndarray) -> np.ndarray:
    """Non-systematic encoding, x = expand(u) . F_N in natural order."""
    return polar_transform(expand(code, u))


def save_frozen_mask(code: PolarCode) -> str:
    """Serialise the ROM contents: header line, then N bits as hex."""
    bits = code.frozen_mask.astype(np.uint8)
    pad = (-code.N) % 4
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    nibbles = bits.reshape(-1, 4) @ np.array([8, 4, 2, 1])
    hex_text = "".join(f"{v:x}" for v in nibbles)
    return f"n={code.n} K={code.K}\n{hex_text}\n"


def load_frozen_mask(text: str) -> PolarCode:
    """Parse the format written by :func:`save_frozen_mask`."""
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if len(lines) != 2:
        raise FrozenMaskFormatError(f"expected 2 lines, got {len(lines)}")

    header = dict(
        item.split("=", 1) for item in lines[0].split() if "=" in item
    )
    try:
        n = int(header["n"])
        K = int(header["K"])
    except (KeyError, ValueError) as exc:
        raise FrozenMaskFormatError(f"bad header line: {lines[0]!r}") from exc
    if not MIN_N_LOG2 <= n <= MAX_N_LOG2:
        raise FrozenMaskFormatError(f"n out of range in header: {n}")

    N = 1 << n
    hex_text = lines[1].lower()
    if len(hex_text) != (N + 3) // 4:
        raise FrozenMaskFormatError(
            f"expected {(N + 3) // 4} hex digits for N={N}, got {len(hex_text)}"
        )
    try:
        nibbles = [int(ch, 16) for ch in hex_text]
    except ValueError as exc:
        raise FrozenMaskFormatError("mask line is not hexadecimal") from exc

    bits = np.array(
        [(v >> s) & 1 for v in nibbles for s in (3, 2, 1, 0)], dtype=bool
    )
    if bits[N:].any():
        raise FrozenMaskFormatError("non-zero padding bits after index N-1")
    mask = bits[:N]
    if int(mask.sum()) != N - K:
        raise FrozenMaskFormatError(
            f"mask freezes {int(mask.sum())} bits but header declares K={K}"
        )
    return PolarCode(n=n, K=K, frozen_mask=mask)
