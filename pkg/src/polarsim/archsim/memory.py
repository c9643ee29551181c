"""
Storage of the semi-parallel decoder: channel and internal LLR SRAMs,
partial-sum SRAMs and the frozen-bit ROM.

Word layout (a declared convention, the block diagram gives no addresses):

* ``ch0``/``ch1`` hold channel LLRs [0, N/2) and [N/2, N), P per word.
* Stage l keeps the 2**l LLRs it produced in ``int{l}.lo`` (first half) and
  ``int{l}.hi`` (second half), so the stage below reads one word from each
  bank and concatenates them into its 2P-LLR operand vector. Banks are P
  LLRs wide once 2**l >= 2P and P/2 wide below that.
* ``ps{m}.{slot}`` holds the 2**m re-encoded bits consumed by stage-m g
  activations, P bits per word, ping-pong for m <= n-2.
* ``rom`` stores one frozen flag per decoded bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Tuple

import numpy as np

from ..errors import AddressError, ContentionError, ParameterError
from ..numerics import QuantScheme

logger = logging.getLogger(__name__)

CHANNEL_BANKS = ("ch0", "ch1")
ROM = "rom"


@dataclass
class Bank:
    name: str
    kind: str  # channel, internal, psum or rom
    depth: int
    width: int
    lane_bits: int
    data: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dtype = np.uint8 if self.lane_bits == 1 else np.int32
        self.data = np.zeros((self.depth, self.width), dtype=dtype)

    @property
    def word_bits(self) -> int:
        return self.width * self.lane_bits

    @property
    def bits(self) -> int:
        return self.depth * self.word_bits


def internal_bank(stage: int, upper: bool) -> str:
    return f"int{stage}.{'hi' if upper else 'lo'}"


def psum_bank(m: int, slot: int) -> str:
    return f"ps{m}.{slot}"


@dataclass
class MemoryAudit:
    peak_bits: Dict[str, int]
    capacity_bits: Dict[str, int]
    channel_reads_after_half: int
    rom_reads: int
    emitted_bits: int

    @property
    def ok(self) -> bool:
        within = all(
            self.peak_bits[kind] <= self.capacity_bits[kind] for kind in self.peak_bits
        )
        return (
            within
            and self.channel_reads_after_half == 0
            and self.rom_reads == self.emitted_bits
        )


class MemoryModel:
    """
    Geometry and contents of every memory of the decoder.

    Accesses go through :meth:`read` and :meth:`write`, which check addresses
    against the declared geometry and log ``(unit, op, bank, address)``
    tuples that :meth:`drain` hands to the trace once per cycle.
    """

    def __init__(self, N: int, P: int, scheme: QuantScheme):
        if N & (N - 1) or P & (P - 1) or not 2 <= P <= N // 4:
            raise ParameterError(f"invalid geometry N={N}, P={P}")
        self.N = N
        self.P = P
        self.n = N.bit_length() - 1
        self.scheme = scheme
        self.log: List[Tuple[str, str, str, int]] = []
        self.unit = "dec"
        self.banks: Dict[str, Bank] = {}

        for name in CHANNEL_BANKS:
            self._add(Bank(name, "channel", N // (2 * P), P, scheme.qc))
        for stage in range(self.n):
            wide = (1 << stage) >= 2 * P
            width = P if wide else P // 2
            depth = (1 << (stage - 1)) // P if wide else 1
            for upper in (False, True):
                self._add(Bank(internal_bank(stage, upper), "internal", depth, width, scheme.q))
        for m in range(1, self.n):
            for slot in range(self.psum_slots(m)):
                self._add(Bank(psum_bank(m, slot), "psum", max(1, (1 << m) // P), P, 1))
        self._add(Bank(ROM, "rom", N, 1, 1))

    def _add(self, bank: Bank):
        self.banks[bank.name] = bank

    def psum_slots(self, m: int) -> int:
        return 2 if m <= self.n - 2 else 1

    # -- capacities ---------------------------------------------------------

    def _kind_bits(self, kind: str) -> int:
        return sum(b.bits for b in self.banks.values() if b.kind == kind)

    @property
    def channel_bits(self) -> int:
        return self._kind_bits("channel")

    @property
    def internal_bits(self) -> int:
        return self._kind_bits("internal")

    @property
    def llr_bits(self) -> int:
        return self.channel_bits + self.internal_bits

    @property
    def psum_bits(self) -> int:
        return self._kind_bits("psum")

    @property
    def rom_bits(self) -> int:
        return self._kind_bits("rom")

    def capacities(self) -> Dict[str, int]:
        return {
            kind: self._kind_bits(kind) for kind in ("channel", "internal", "psum", "rom")
        }

    # -- access -------------------------------------------------------------

    def _locate(self, name: str, addr: int) -> Bank:
        bank = self.banks.get(name)
        if bank is None:
            raise AddressError(f"no memory named {name!r}")
        if not 0 <= addr < bank.depth:
            raise AddressError(f"{name}[{addr}] outside depth {bank.depth}")
        return bank

    def read(self, name: str, addr: int) -> np.ndarray:
        bank = self._locate(name, addr)
        self.log.append((self.unit, "r", name, addr))
        return bank.data[addr].copy()

    def write(self, name: str, addr: int, values, lane: int = 0):
        bank = self._locate(name, addr)
        values = np.atleast_1d(values)
        if lane < 0 or lane + values.size > bank.width:
            raise AddressError(
                f"{name}[{addr}] lanes {lane}..{lane + values.size - 1} exceed width {bank.width}"
            )
        self.log.append((self.unit, "w", name, addr))
        bank.data[addr, lane : lane + values.size] = values

    def drain(self) -> List[Tuple[str, str, str, int]]:
        """Return and clear the accesses of the current cycle."""
        entries, self.log = self.log, []
        channel_reads = {(b, a) for _, op, b, a in entries if op == "r" and b in CHANNEL_BANKS}
        channel_writes = {(b, a) for _, op, b, a in entries if op == "w" and b in CHANNEL_BANKS}
        clash = channel_reads & channel_writes
        if clash:
            bank, addr = sorted(clash)[0]
            raise ContentionError(f"{bank}[{addr}] read and written in the same cycle")
        return entries

    def preload_channel(self, raw: np.ndarray):
        """Fill both channel banks outside the cycle count (first frame)."""
        half = self.N // 2
        self.banks["ch0"].data[:] = raw[:half].reshape(-1, self.P)
        self.banks["ch1"].data[:] = raw[half:].reshape(-1, self.P)

    def load_rom(self, frozen_mask: np.ndarray):
        self.banks[ROM].data[:, 0] = frozen_mask.astype(np.uint8)

    # -- audit --------------------------------------------------------------

    def audit(self, trace: Iterable) -> MemoryAudit:
        """Check a trace against the geometry (see module docstring)."""
        touched: Dict[str, set] = {}
        channel_after_half = 0
        rom_reads = 0
        emitted = 0
        half_done = False
        for event in trace:
            for name, addr in list(event.reads) + list(event.writes):
                self._locate(name, addr)
                touched.setdefault(name, set()).add(addr)
            for name, _ in event.reads:
                if name == ROM:
                    rom_reads += 1
                elif name in CHANNEL_BANKS and half_done and event.unit != "load":
                    channel_after_half += 1
            for index, _ in event.emitted:
                emitted += 1
                if index == self.N // 2:
                    half_done = True

        peak = {kind: 0 for kind in ("channel", "internal", "psum", "rom")}
        for name, addrs in touched.items():
            bank = self.banks[name]
            peak[bank.kind] += len(addrs) * bank.word_bits
        return MemoryAudit(
            peak_bits=peak,
            capacity_bits=self.capacities(),
            channel_reads_after_half=channel_after_half,
            rom_reads=rom_reads,
            emitted_bits=emitted,
        )
