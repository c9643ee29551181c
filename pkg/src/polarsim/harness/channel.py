"""BPSK over AWGN, with one counter-based random stream per frame."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

import numpy as np

from ..codebook import PolarCode, encode
from ..errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: Union[Fraction, float]
    seed: int = 0
    modulation: str = "BPSK"

    def __post_init__(self):
        if not math.isfinite(self.ebn0_db):
            raise ParameterError(f"Eb/N0 must be finite, got {self.ebn0_db}")
        if not 0 < float(self.rate) <= 1:
            raise ParameterError(f"rate must be in (0, 1], got {self.rate}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.modulation != "BPSK":
            raise ParameterError(f"unsupported modulation {self.modulation!r}")

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * float(self.rate) * 10.0 ** (self.ebn0_db / 10.0))

    @classmethod
    def from_settings(cls, settings, ebn0_db: float) -> "ChannelConfig":
        return cls(ebn0_db=ebn0_db, rate=settings.rate, seed=settings.seed)


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    """Independent stream for frame ``frame`` of a run seeded with ``seed``."""
    if frame < 0:
        raise ParameterError(f"frame index must be non-negative, got {frame}")
    return np.random.Generator(np.random.Philox(key=seed, counter=frame << 192))


def transmit(
    code: PolarCode,
    u: np.ndarray,
    channel: ChannelConfig,
    rng_stream: Union[int, np.random.Generator],
) -> np.ndarray:
    """
    Encode ``u``, send it through BPSK/AWGN and return the channel LLRs.

    ``rng_stream`` is a frame index (mapped to :func:`frame_rng`) or a
    generator to draw the noise from.
    """
    if not isinstance(rng_stream, np.random.Generator):
        rng_stream = frame_rng(channel.seed, int(rng_stream))
    x = encode(code, u)
    sigma2 = channel.sigma2
    y = (1.0 - 2.0 * x) + rng_stream.normal(0.0, math.sqrt(sigma2), size=x.shape)
    return 2.0 * y / sigma2


def draw_frame(
    code: PolarCode, channel: ChannelConfig, frame: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Random information bits and their LLRs; bits are drawn before noise."""
    rng = frame_rng(channel.seed, frame)
    u = rng.integers(0, 2, size=code.K, dtype=np.uint8)
    return u, transmit(code, u, channel, rng)


def draw_batch(
    code: PolarCode, channel: ChannelConfig, first: int, count: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Frames ``first .. first + count - 1`` stacked into (count, K) and (count, N)."""
    u = np.empty((count, code.K), dtype=np.uint8)
    llr = np.empty((count, code.N))
    for i in range(count):
        u[i], llr[i] = draw_frame(code, channel, first + i)
    return u, llr
