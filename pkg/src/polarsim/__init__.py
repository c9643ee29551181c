"""
Bit-exact model of a scalable semi-parallel successive-cancellation polar
decoder: code construction, reference decoders, a cycle-accurate architecture
simulator, closed-form metrics and a Monte Carlo harness.
"""

from .codebook import PolarCode, construct_code, encode
from .errors import (
    AddressError,
    ConfigError,
    ContentionError,
    FrozenMaskFormatError,
    ParameterError,
    PolarSimError,
)
from .numerics import FxLLR, QuantScheme
from .refdec import DecodeAlgo, SCDecoder, extract_info, sc_decode

__version__ = "0.1.1"

__all__ = [
    "AddressError",
    "ConfigError",
    "ContentionError",
    "DecodeAlgo",
    "FrozenMaskFormatError",
    "FxLLR",
    "ParameterError",
    "PolarCode",
    "PolarSimError",
    "QuantScheme",
    "SCDecoder",
    "construct_code",
    "encode",
    "extract_info",
    "sc_decode",
]
