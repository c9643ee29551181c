"""
LLR node functions and saturating fixed-point arithmetic.

Scalar helpers accept either Python floats or :class:`FxLLR` values. The
``*_array`` kernels work on numpy arrays (float LLRs, or integer raw values
when a saturation bound is supplied) and are what the decoders call.

Fixed-point values use symmetric saturation: a Q-bit word holds raw values in
``[-(2**(Q-1) - 1), 2**(Q-1) - 1]``, so negation never overflows.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

MAX_TOTAL_BITS = 16
_SCHEME_RE = re.compile(r"^\(?\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)?$")


@dataclass(frozen=True)
class QuantScheme:
    """(Qi, Qic, Qf): integer bits internal, integer bits channel, fraction bits."""

    qi: int
    qic: int
    qf: int

    def __post_init__(self):
        if self.qf < 0 or self.qi < 1 or self.qic < 1:
            raise ParameterError(f"invalid quantization {self}")
        if self.q > MAX_TOTAL_BITS:
            raise ParameterError(f"Q = {self.q} exceeds {MAX_TOTAL_BITS} bits")
        if self.qic > self.qi:
            raise ParameterError(
                f"channel integer bits ({self.qic}) exceed internal ones ({self.qi})"
            )

    @property
    def q(self) -> int:
        return self.qi + self.qf

    @property
    def qc(self) -> int:
        return self.qic + self.qf

    @property
    def max_raw(self) -> int:
        return (1 << (self.q - 1)) - 1

    @property
    def max_raw_channel(self) -> int:
        return (1 << (self.qc - 1)) - 1

    @property
    def step(self) -> float:
        return 2.0 ** -self.qf

    @classmethod
    def parse(cls, text: str) -> "QuantScheme":
        """Build a scheme from ``"(6,3,2)"`` or ``"6,3,2"``."""
        match = _SCHEME_RE.match(text.strip())
        if not match:
            raise ParameterError(f"cannot parse quantization scheme {text!r}")
        return cls(*(int(g) for g in match.groups()))

    def __str__(self):
        return f"({self.qi},{self.qic},{self.qf})"


@dataclass(frozen=True)
class FxLLR:
    """A saturating fixed-point LLR: ``raw * 2**-frac_bits`` in a ``bits``-wide word."""

    raw: int
    bits: int
    frac_bits: int = 0

    def __post_init__(self):
        if self.bits < 2:
            raise ParameterError(f"word width must be at least 2 bits, got {self.bits}")
        if abs(self.raw) > self.max_raw:
            raise ParameterError(f"raw value {self.raw} does not fit {self.bits} bits")

    @property
    def max_raw(self) -> int:
        return (1 << (self.bits - 1)) - 1

    @property
    def value(self) -> float:
        return self.raw * 2.0 ** -self.frac_bits

    @staticmethod
    def saturate(raw: int, bits: int) -> int:
        bound = (1 << (bits - 1)) - 1
        return max(-bound, min(bound, raw))


def _check_same_format(a: FxLLR, b: FxLLR):
    if (a.bits, a.frac_bits) != (b.bits, b.frac_bits):
        raise ParameterError(
            f"format mismatch: Q={a.bits}/Qf={a.frac_bits} vs Q={b.bits}/Qf={b.frac_bits}"
        )


def _sign(x) -> int:
    return -1 if x < 0 else 1


def f_minsum(a, b):
    """Min-sum check-node function, sign(0) = +1."""
    if isinstance(a, FxLLR) or isinstance(b, FxLLR):
        if not (isinstance(a, FxLLR) and isinstance(b, FxLLR)):
            raise ParameterError("cannot mix fixed-point and float operands")
        _check_same_format(a, b)
        raw = _sign(a.raw) * _sign(b.raw) * min(abs(a.raw), abs(b.raw))
        return FxLLR(raw, a.bits, a.frac_bits)
    return float(_sign(a) * _sign(b) * min(abs(a), abs(b)))


def f_spa(a: float, b: float) -> float:
    """Sum-product check-node function (float only)."""
    return float(f_spa_array(np.array([a], dtype=float), np.array([b], dtype=float))[0])


def g(s: int, a, b):
    """Variable-node function a * (-1)**s + b; the fixed variant saturates."""
    if s not in (0, 1):
        raise ParameterError(f"partial sum must be 0 or 1, got {s}")
    if isinstance(a, FxLLR) or isinstance(b, FxLLR):
        if not (isinstance(a, FxLLR) and isinstance(b, FxLLR)):
            raise ParameterError("cannot mix fixed-point and float operands")
        _check_same_format(a, b)
        raw = (-a.raw if s else a.raw) + b.raw
        return FxLLR(FxLLR.saturate(raw, a.bits), a.bits, a.frac_bits)
    return float((-a if s else a) + b)


def hard_decision(a) -> int:
    value = a.raw if isinstance(a, FxLLR) else a
    return 0 if value >= 0 else 1


def quantize_channel(y_llr: float, scheme: QuantScheme) -> FxLLR:
    """Round to the nearest 2**-Qf (ties away from zero), saturate to Qc bits."""
    raw = int(quantize_channel_array(np.array([y_llr], dtype=float), scheme)[0])
    return FxLLR(raw, scheme.qc, scheme.qf)


def sign_extend(x: FxLLR, scheme: QuantScheme) -> FxLLR:
    """Widen a channel word to the internal format; the value is unchanged."""
    if x.bits > scheme.q:
        raise ParameterError(f"cannot widen {x.bits}-bit word into {scheme.q} bits")
    return FxLLR(x.raw, scheme.q, x.frac_bits)


# -- array kernels -----------------------------------------------------------


def f_minsum_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sign = np.where((a < 0) ^ (b < 0), -1, 1).astype(a.dtype)
    return sign * np.minimum(np.abs(a), np.abs(b))


def f_spa_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # 2 atanh(tanh(a/2) tanh(b/2)) in log1p form, exact for any magnitude
    sign = np.where((a < 0) ^ (b < 0), -1.0, 1.0)
    bound = np.minimum(np.abs(a), np.abs(b))
    mag = bound + sign * (np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b))))
    # rounding can push the magnitude past the exact bound
    return sign * np.clip(mag, 0.0, bound)


def g_array(s: np.ndarray, a: np.ndarray, b: np.ndarray, max_raw: int | None = None):
    out = np.where(s.astype(bool), b - a, b + a)
    if max_raw is not None:
        np.clip(out, -max_raw, max_raw, out=out)
    return out


def hard_decision_array(a: np.ndarray) -> np.ndarray:
    return (a < 0).astype(np.uint8)


def quantize_channel_array(y_llr: np.ndarray, scheme: QuantScheme) -> np.ndarray:
    """Vector form of :func:`quantize_channel`, returning int32 raw values."""
    y = np.asarray(y_llr, dtype=float)
    if np.isnan(y).any():
        raise ParameterError("cannot quantize NaN channel LLRs")
    scaled = np.abs(y) * (1 << scheme.qf)
    bound = scheme.max_raw_channel
    # clip before the integer cast so +/-inf saturate cleanly
    mag = np.minimum(np.floor(scaled + 0.5), bound)
    return (np.sign(y) * mag).astype(np.int32)


def llr_to_real(raw: np.ndarray, scheme: QuantScheme) -> np.ndarray:
    return np.asarray(raw, dtype=float) * scheme.step
