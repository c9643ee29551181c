from .channel import ChannelConfig, draw_batch, draw_frame, frame_rng, transmit
from .config import SimulationSettings, load_settings
from .montecarlo import (
    DecoderSpec,
    ErrorRatePoint,
    StopRule,
    compare_quantization,
    horizontal_gap,
    make_decoder,
    run_point,
    sweep,
)
from .results import write_comparison_csv, write_gnuplot, write_points_csv

__all__ = [
    "ChannelConfig",
    "DecoderSpec",
    "ErrorRatePoint",
    "SimulationSettings",
    "StopRule",
    "compare_quantization",
    "draw_batch",
    "draw_frame",
    "frame_rng",
    "horizontal_gap",
    "load_settings",
    "make_decoder",
    "run_point",
    "sweep",
    "transmit",
    "write_comparison_csv",
    "write_gnuplot",
    "write_points_csv",
]
