"""
Cycle-accurate model of the semi-parallel SC decoder.

One decoding stage is active per cycle (or one encoder stage; the two never
overlap). Stage l computes its 2**l outputs with min(P, 2**l) PEs over
max(1, 2**l / P) cycles, f on the first visit of a node and g on the second.
Stage 0 is the chained PE, which decides two bits per cycle. After bits
2m, 2m+1 the partial-sum encoder runs its stages 0, 1, ... while (m + 1) is
a multiple of 2**l; nothing runs after the last pair.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..codebook import PolarCode
from ..errors import ContentionError, ParameterError
from ..numerics import (
    FxLLR,
    QuantScheme,
    f_minsum_array,
    g_array,
    hard_decision_array,
)
from .encoder import PartialSumEncoder
from .memory import CHANNEL_BANKS, ROM, MemoryModel, internal_bank
from .trace import TraceEvent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArchConfig:
    """P decoding PEs running ``code`` with ``scheme`` arithmetic."""

    P: int
    scheme: QuantScheme
    code: PolarCode

    def __post_init__(self):
        if self.P < 2 or self.P & (self.P - 1):
            raise ParameterError(f"P must be a power of two >= 2, got {self.P}")
        if self.P > self.code.N // 4:
            raise ParameterError(
                f"P = {self.P} exceeds N/4 = {self.code.N // 4} for N = {self.code.N}"
            )

    @property
    def N(self) -> int:
        return self.code.N

    @property
    def n(self) -> int:
        return self.code.n


@dataclass
class SimResult:
    u_hat: np.ndarray
    cycles: int
    trace: Optional[List[TraceEvent]]
    decoder_cycles: int
    encoder_cycles: int
    # (stage, first leaf, bits) for every g activation, when collected
    consumed_psums: Optional[List[Tuple[int, int, np.ndarray]]] = None


def channel_raw(cfg: ArchConfig, llrs) -> np.ndarray:
    """Validate channel-quantized LLRs and return them as int32 raw values."""
    if isinstance(llrs, (list, tuple)) and llrs and isinstance(llrs[0], FxLLR):
        raw = np.array([x.raw for x in llrs], dtype=np.int32)
    else:
        raw = np.asarray(llrs)
        if not np.issubdtype(raw.dtype, np.integer):
            raise ParameterError("channel LLRs must be quantized raw integers")
    if raw.shape != (cfg.N,):
        raise ParameterError(f"expected {cfg.N} channel LLRs, got shape {raw.shape}")
    if np.abs(raw).max(initial=0) > cfg.scheme.max_raw_channel:
        raise ParameterError(f"channel LLRs exceed Qc = {cfg.scheme.qc} bits")
    return raw.astype(np.int32)


class SemiParallelDecoder:
    """
    Clocked decoder instance.

    Usage is ``begin(llrs)``, then any number of :meth:`step` calls (or
    :meth:`run_until_bit`), then :meth:`finish`. While the second half of a
    frame is being decoded, :meth:`load_next_frame` streams the next frame
    into the channel memory; ``begin()`` without arguments then starts it.
    """

    def __init__(
        self,
        cfg: ArchConfig,
        *,
        chained: bool = True,
        record_trace: bool = True,
        collect_psums: bool = False,
    ):
        self.cfg = cfg
        self.chained = chained
        self.record_trace = record_trace
        self.collect_psums = collect_psums
        self.memory = MemoryModel(cfg.N, cfg.P, cfg.scheme)
        self.memory.load_rom(cfg.code.frozen_mask)
        self.encoder = PartialSumEncoder(self.memory)
        self._max_raw = cfg.scheme.max_raw
        self._schedule: Optional[Iterator[None]] = None
        self._pending: Optional[np.ndarray] = None
        self._load_word = 0
        self._next_ready = False
        self.done = False

    # -- frame control ------------------------------------------------------

    def begin(self, channel_llrs=None):
        if channel_llrs is not None:
            if self._pending is not None:
                raise ContentionError("a frame is still being loaded into channel memory")
            self.memory.preload_channel(channel_raw(self.cfg, channel_llrs))
        elif not self._next_ready:
            raise ParameterError("no channel LLRs given and no frame was loaded")
        self._next_ready = False
        self.memory.log = []
        self.encoder.reset()
        self.cycle = 0
        self.emitted = 0
        self.last_emit_cycle = -1
        self.decoder_cycles = 0
        self.encoder_cycles = 0
        self.u_hat = np.zeros(self.cfg.N, dtype=np.uint8)
        self.trace: Optional[List[TraceEvent]] = [] if self.record_trace else None
        self.consumed: Optional[list] = [] if self.collect_psums else None
        self._event: Optional[TraceEvent] = None
        self._schedule = self._decode_node(self.cfg.n - 1, 0)
        self.done = False
        return self

    def step(self) -> bool:
        """Advance one clock cycle; False once the frame has been decoded."""
        if self._schedule is None:
            raise ParameterError("no frame in progress; call begin() first")
        if self.done:
            return False
        try:
            next(self._schedule)
        except StopIteration:
            self.done = True
            return False
        self._service_load()
        self._close_cycle()
        return True

    def run_until_bit(self, index: int):
        """Run until bit ``index`` has been emitted."""
        if not 0 <= index < self.cfg.N:
            raise ParameterError(f"bit index {index} out of range")
        while self.emitted <= index:
            if not self.step():
                raise ParameterError(f"frame ended before bit {index}")

    def finish(self) -> SimResult:
        while self.step():
            pass
        # words still missing from a frame load take extra cycles
        while self._pending is not None:
            self._event = None
            self._service_load()
            self._close_cycle()
        return SimResult(
            u_hat=self.u_hat.copy(),
            cycles=self.last_emit_cycle + 1,
            trace=self.trace,
            decoder_cycles=self.decoder_cycles,
            encoder_cycles=self.encoder_cycles,
            consumed_psums=self.consumed,
        )

    def load_next_frame(self, next_channel_llrs) -> int:
        """
        Queue the next frame for loading; returns the number of load cycles.

        Loading starts once bit N/2 has been emitted, when the channel memory
        is no longer read.
        """
        if self._schedule is None or self.done:
            raise ParameterError("no frame in progress; pass the LLRs to begin()")
        if self.emitted <= self.cfg.N // 2:
            raise ContentionError(
                f"channel memory still in use: only {self.emitted} bits decoded, "
                f"loading is allowed after bit {self.cfg.N // 2}"
            )
        if self._pending is not None or self._next_ready:
            raise ContentionError("next frame already loaded")
        self._pending = channel_raw(self.cfg, next_channel_llrs)
        self._load_word = 0
        return self.memory.banks["ch0"].depth

    # -- per-cycle bookkeeping ----------------------------------------------

    def _open(self, unit: str, stage: int, func: str, step: int, steps: int):
        name = f"{func}_{step}" if steps > 1 else func
        self._event = TraceEvent(self.cycle, unit, stage, name)
        self.memory.unit = unit
        if unit == "dec":
            self.decoder_cycles += 1
        else:
            self.encoder_cycles += 1

    def _emit(self, index: int, bit: int):
        self.u_hat[index] = bit
        self.emitted += 1
        self.last_emit_cycle = self.cycle
        self._event.emitted.append((index, int(bit)))

    def _service_load(self):
        if self._pending is None:
            return
        P, w = self.cfg.P, self._load_word
        half = self.cfg.N // 2
        self.memory.unit = "load"
        self.memory.write("ch0", w, self._pending[w * P : (w + 1) * P])
        self.memory.write("ch1", w, self._pending[half + w * P : half + (w + 1) * P])
        self._load_word += 1
        if self._load_word == self.memory.banks["ch0"].depth:
            self._pending = None
            self._next_ready = True

    def _close_cycle(self):
        entries = self.memory.drain()
        if self.trace is not None:
            loads = [e for e in entries if e[0] == "load"]
            if self._event is not None:
                self._fill(self._event, [e for e in entries if e[0] != "load"])
                self.trace.append(self._event)
            if loads:
                event = TraceEvent(self.cycle, "load", None, "load")
                self._fill(event, loads)
                self.trace.append(event)
        self._event = None
        self.cycle += 1

    @staticmethod
    def _fill(event: TraceEvent, entries):
        event.reads = sorted({(b, a) for _, op, b, a in entries if op == "r"})
        event.writes = sorted({(b, a) for _, op, b, a in entries if op == "w"})

    # -- schedule -----------------------------------------------------------

    def _decode_node(self, stage: int, offset: int):
        """Decode the 2**(stage+1) leaves starting at ``offset``."""
        if stage == 0:
            yield from self._stage0(offset)
            yield from self._encode_after(offset // 2)
            return
        yield from self._activate(stage, "f", offset)
        yield from self._decode_node(stage - 1, offset)
        yield from self._activate(stage, "g", offset)
        yield from self._decode_node(stage - 1, offset + (1 << stage))

    def _operands(self, stage: int, word: int, width: int):
        if stage == self.cfg.n - 1:
            lo, hi = CHANNEL_BANKS
        else:
            lo, hi = internal_bank(stage + 1, False), internal_bank(stage + 1, True)
        a = self.memory.read(lo, word)[:width]
        b = self.memory.read(hi, word)[:width]
        return a, b

    def _store(self, stage: int, start: int, out: np.ndarray):
        P = self.cfg.P
        half = 1 << (stage - 1)
        if (1 << stage) >= 2 * P:
            upper = start >= half
            word = (start - half if upper else start) // P
            self.memory.write(internal_bank(stage, upper), word, out)
        else:
            self.memory.write(internal_bank(stage, False), 0, out[:half])
            self.memory.write(internal_bank(stage, True), 0, out[half:])

    def _activate(self, stage: int, func: str, offset: int):
        P = self.cfg.P
        width = min(P, 1 << stage)
        steps = max(1, (1 << stage) // P)
        for c in range(steps):
            self._open("dec", stage, func, c, steps)
            a, b = self._operands(stage, c, width)
            if func == "f":
                out = f_minsum_array(a, b)
            else:
                s = self.encoder.read(stage, c * width, width)
                if self.consumed is not None:
                    self.consumed.append((stage, offset + c * width, s.copy()))
                out = g_array(s, a, b, self._max_raw)
            self._store(stage, c * width, out)
            yield

    def _decide(self, index: int, llr) -> int:
        frozen = self.memory.read(ROM, index)[0]
        return 0 if frozen else int(hard_decision_array(llr)[0])

    def _stage0(self, offset: int):
        lo, hi = internal_bank(0, False), internal_bank(0, True)
        if self.chained:
            self._open("dec", 0, "fg", 0, 1)
            a, b = self._operands(0, 0, 1)
            lf = f_minsum_array(a, b)
            first = self._decide(offset, lf)
            lg = g_array(np.array([first]), a, b, self._max_raw)
            second = self._decide(offset + 1, lg)
            self.memory.write(lo, 0, lf)
            self.memory.write(hi, 0, lg)
            self._record_stage0(offset, first)
            self._emit(offset, first)
            self._emit(offset + 1, second)
            yield
            return

        self._open("dec", 0, "f", 0, 1)
        a, b = self._operands(0, 0, 1)
        lf = f_minsum_array(a, b)
        first = self._decide(offset, lf)
        self.memory.write(lo, 0, lf)
        self._emit(offset, first)
        yield
        self._open("dec", 0, "g", 0, 1)
        a, b = self._operands(0, 0, 1)
        lg = g_array(np.array([first]), a, b, self._max_raw)
        second = self._decide(offset + 1, lg)
        self.memory.write(hi, 0, lg)
        self._record_stage0(offset, first)
        self._emit(offset + 1, second)
        yield

    def _record_stage0(self, offset: int, first: int):
        if self.consumed is not None:
            self.consumed.append((0, offset, np.array([first], dtype=np.uint8)))

    def _encode_after(self, m: int):
        if m == self.cfg.N // 2 - 1:
            return
        pair = (int(self.u_hat[2 * m]), int(self.u_hat[2 * m + 1]))
        l = 0
        while l <= self.cfg.n - 2 and (m + 1) % (1 << l) == 0:
            steps = self.encoder.steps(l)
            for c in range(steps):
                self._open("enc", l, "e", c, steps)
                self.encoder.step(l, c, pair)
                yield
            l += 1


def simulate_decode(
    cfg: ArchConfig,
    channel_llrs,
    *,
    chained: bool = True,
    record_trace: bool = True,
    collect_psums: bool = False,
) -> SimResult:
    """Decode one frame of channel-quantized LLRs on the modelled hardware."""
    sim = SemiParallelDecoder(
        cfg, chained=chained, record_trace=record_trace, collect_psums=collect_psums
    )
    result = sim.begin(channel_llrs).finish()
    logger.debug(
        "N=%d P=%d decoded in %d cycles (%d encoder)",
        cfg.N,
        cfg.P,
        result.cycles,
        result.encoder_cycles,
    )
    return result


def load_next_frame(sim: SemiParallelDecoder, next_channel_llrs) -> int:
    return sim.load_next_frame(next_channel_llrs)


def decode_stream(
    cfg: ArchConfig, frames: Sequence, *, chained: bool = True
) -> Tuple[List[SimResult], int]:
    """
    Decode frames back to back, loading each one during the second half of
    its predecessor. Returns the per-frame results and the total cycle count.
    """
    if len(frames) == 0:
        return [], 0
    sim = SemiParallelDecoder(cfg, chained=chained, record_trace=False)
    sim.begin(frames[0])
    results: List[SimResult] = []
    total = 0
    for k in range(len(frames)):
        if k + 1 < len(frames):
            sim.run_until_bit(cfg.N // 2)
            sim.load_next_frame(frames[k + 1])
        result = sim.finish()
        results.append(result)
        # cycle counter includes any load cycles past the last emission
        total += sim.cycle
        if k + 1 < len(frames):
            sim.begin()
    return results, total
