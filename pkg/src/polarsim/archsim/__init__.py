from .encoder import PartialSumEncoder, encoder_node_f, encoder_node_g, partial_sum
from .memory import MemoryAudit, MemoryModel
from .simulator import (
    ArchConfig,
    SemiParallelDecoder,
    SimResult,
    decode_stream,
    load_next_frame,
    simulate_decode,
)
from .trace import TraceEvent, activation_table, dump_trace, load_trace

__all__ = [
    "ArchConfig",
    "MemoryAudit",
    "MemoryModel",
    "PartialSumEncoder",
    "SemiParallelDecoder",
    "SimResult",
    "TraceEvent",
    "activation_table",
    "decode_stream",
    "dump_trace",
    "encoder_node_f",
    "encoder_node_g",
    "load_next_frame",
    "load_trace",
    "partial_sum",
    "simulate_decode",
]
