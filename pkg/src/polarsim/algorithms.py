"""
Decoder definitions for the simulation front-end.
Each entry names the decoder, what it needs from the configuration, and how
it maps onto the reference decoders or the architecture simulator.
"""

from dataclasses import dataclass
from typing import Dict, List

from .errors import ParameterError
from .numerics import QuantScheme


@dataclass
class Algorithm:
    """A decoder that can be selected with ``--algo``."""

    name: str
    description: str
    dependencies: List[str]  # configuration keys the decoder needs
    kind: str  # refdec variant, or "arch" for the cycle-accurate simulator
    fixed_point: bool


ALGORITHMS = {
    "spa": Algorithm(
        name="SPA, floating point",
        description="SC decoding with the exact sum-product check-node rule",
        dependencies=[],
        kind="SPA_float",
        fixed_point=False,
    ),
    "msa": Algorithm(
        name="MSA, floating point",
        description="SC decoding with the min-sum approximation",
        dependencies=[],
        kind="MSA_float",
        fixed_point=False,
    ),
    "msa-fixed": Algorithm(
        name="MSA, fixed point",
        description="Min-sum SC decoding with (Qi, Qic, Qf) saturating arithmetic",
        dependencies=["scheme"],
        kind="MSA_fixed",
        fixed_point=True,
    ),
    "arch": Algorithm(
        name="Semi-parallel architecture",
        description="Cycle-accurate simulation of the P-PE decoder (bit-exact to msa-fixed)",
        dependencies=["scheme", "p"],
        kind="arch",
        fixed_point=True,
    ),
}

# Quantization found sufficient for N = 2**15 codes, keyed by code rate.
QUANT_PRESETS: Dict[float, QuantScheme] = {
    0.25: QuantScheme(6, 3, 2),
    0.50: QuantScheme(6, 3, 2),
    0.75: QuantScheme(6, 4, 1),
    0.90: QuantScheme(6, 4, 0),
}


def get_algorithm(key: str) -> Algorithm:
    if key not in ALGORITHMS:
        raise ParameterError(
            f"unknown algorithm {key!r}; available: {', '.join(ALGORITHMS)}"
        )
    return ALGORITHMS[key]


def get_algorithm_requirements(key: str) -> List[str]:
    """Configuration keys the selected decoder cannot run without."""
    return list(get_algorithm(key).dependencies)


def preset_for_rate(rate: float) -> QuantScheme:
    """Quantization preset of the nearest tabulated rate."""
    nearest = min(QUANT_PRESETS, key=lambda r: (abs(r - float(rate)), r))
    return QUANT_PRESETS[nearest]
