"""
Closed-form latency, memory and throughput of the semi-parallel decoder,
plus the report that sets them against simulation and FPGA measurements.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, TextIO

from .errors import ParameterError, PolarSimError
from .numerics import QuantScheme

logger = logging.getLogger(__name__)

# Throughput estimate assumes P = 64 PEs.
THROUGHPUT_P = 64
THROUGHPUT_CONSTANT = 71.5


def _log2(x: int) -> int:
    return x.bit_length() - 1


def _check_geometry(N: int, P: int):
    if N < 1 or N & (N - 1):
        raise ParameterError(f"N must be a power of two, got {N}")
    if P < 2 or P & (P - 1):
        raise ParameterError(f"P must be a power of two >= 2, got {P}")
    if P > N // 4:
        raise ParameterError(f"P = {P} exceeds N/4 = {N // 4}")


def _stages(N: int, P: int) -> int:
    """log2(N / 4P), the number of stages that need several cycles."""
    return _log2(N // (4 * P))


def latency_cycles(N: int, P: int) -> int:
    """Decoding latency in clock cycles."""
    _check_geometry(N, P)
    return (N // P) * (5 * P // 2 - 1) + (2 * N // P) * _stages(N, P) - _log2(P) + 2


def baseline_latency_cycles(N: int, P: int) -> int:
    """Latency of the semi-parallel decoder without chaining or encoder cost."""
    _check_geometry(N, P)
    return 2 * N + (N // P) * _stages(N, P)


def chaining_saving_cycles(N: int) -> int:
    return N // 2


def encoder_overhead_cycles(N: int, P: int) -> int:
    """Cycles spent in the partial-sum encoder before the last decision."""
    _check_geometry(N, P)
    return (N // P) * (P - 1) + (N // P) * _stages(N, P) - _log2(P) + 2


def llr_sram_bits(
    N: int,
    P: int,
    scheme: Optional[QuantScheme] = None,
    *,
    q: Optional[int] = None,
    qc: Optional[int] = None,
) -> int:
    """
    Channel plus internal LLR memory, Qc*N + Q*(N + P*log2(P) - P).

    Word widths come from ``scheme``, or from ``q``/``qc`` directly.
    """
    _check_geometry(N, P)
    if scheme is not None:
        q, qc = scheme.q, scheme.qc
    if q is None or qc is None or q < 0 or qc < 0:
        raise ParameterError("need a QuantScheme or non-negative q and qc")
    return qc * N + q * (N + P * _log2(P) - P)


def psum_sram_bits(N: int, P: int) -> int:
    _check_geometry(N, P)
    return P * (3 * N // (2 * P) + 2 * _log2(P) - 4)


def rom_bits(N: int) -> int:
    if N < 1 or N & (N - 1):
        raise ParameterError(f"N must be a power of two, got {N}")
    return N


def throughput_bps(N: int, R: float, fmax: float) -> float:
    """Information throughput at P = 64: R * 32 * fmax / (71.5 + log2 N)."""
    if N < 1 or N & (N - 1):
        raise ParameterError(f"N must be a power of two, got {N}")
    if not 0 < R <= 1 or fmax <= 0:
        raise ParameterError(f"invalid rate {R} or clock {fmax}")
    return R * 32.0 * fmax / (THROUGHPUT_CONSTANT + _log2(N))


@dataclass(frozen=True)
class LatencyBreakdown:
    N: int
    P: int
    baseline: int
    chaining_saving: int
    encoder_overhead: int
    latency: int

    @property
    def ok(self) -> bool:
        return self.baseline - self.chaining_saving + self.encoder_overhead == self.latency

    @property
    def overhead_ratio(self) -> float:
        return self.encoder_overhead / (self.latency - self.encoder_overhead)


def consistency_check(N: int, P: int) -> LatencyBreakdown:
    """Baseline minus chaining saving plus encoder overhead, against the total."""
    return LatencyBreakdown(
        N=N,
        P=P,
        baseline=baseline_latency_cycles(N, P),
        chaining_saving=chaining_saving_cycles(N),
        encoder_overhead=encoder_overhead_cycles(N, P),
        latency=latency_cycles(N, P),
    )


@dataclass(frozen=True)
class ArchReport:
    N: int
    P: int
    scheme: QuantScheme
    latency_cc: int
    llr_sram_bits: int
    psum_sram_bits: int
    rom_bits: int
    rate: float = 1.0
    fmax: Optional[float] = None
    simulated_cycles: Optional[int] = None

    @property
    def memory_bits(self) -> int:
        return self.llr_sram_bits + self.psum_sram_bits + self.rom_bits

    def throughput_bps(self, fmax: Optional[float] = None, R: Optional[float] = None):
        fmax = self.fmax if fmax is None else fmax
        if fmax is None:
            return None
        return throughput_bps(self.N, self.rate if R is None else R, fmax)


def arch_report(
    N: int,
    P: int,
    scheme: QuantScheme,
    fmax: Optional[float] = None,
    rate: float = 1.0,
    simulate: bool = False,
) -> ArchReport:
    """All closed forms for one configuration, optionally checked by simulation."""
    simulated = None
    if simulate:
        simulated = _simulated_latency(N, P, scheme, rate)
        if simulated != latency_cycles(N, P):
            raise PolarSimError(
                f"simulated {simulated} cycles, closed form gives {latency_cycles(N, P)}"
            )
    return ArchReport(
        N=N,
        P=P,
        scheme=scheme,
        latency_cc=latency_cycles(N, P),
        llr_sram_bits=llr_sram_bits(N, P, scheme),
        psum_sram_bits=psum_sram_bits(N, P),
        rom_bits=rom_bits(N),
        rate=rate,
        fmax=fmax,
        simulated_cycles=simulated,
    )


def _simulated_latency(N: int, P: int, scheme: QuantScheme, rate: float) -> int:
    import numpy as np

    from .archsim import ArchConfig, simulate_decode
    from .codebook import construct_code

    n = _log2(N)
    K = min(N, max(1, round(rate * N)))
    cfg = ArchConfig(P=P, scheme=scheme, code=construct_code(n, K))
    result = simulate_decode(cfg, np.zeros(N, dtype=np.int32), record_trace=False)
    logger.info("N=%d P=%d simulated latency %d CC", N, P, result.cycles)
    return result.cycles


@dataclass(frozen=True)
class FpgaResult:
    """One measured row; ``throughput_mbps`` is per unit rate when ``rate`` is None."""

    N: int
    rate: Optional[float]
    P: int
    scheme: QuantScheme
    sram_bits: int
    fmax_mhz: float
    throughput_mbps: float


FPGA_RESULTS: List[FpgaResult] = [
    FpgaResult(2**15, 0.25, 64, QuantScheme(6, 3, 2), 510_464, 156, 15),
    FpgaResult(2**15, 0.50, 64, QuantScheme(6, 3, 2), 510_464, 156, 29),
    FpgaResult(2**15, 0.75, 64, QuantScheme(6, 4, 1), 477_440, 155, 43),
    FpgaResult(2**15, 0.90, 64, QuantScheme(6, 4, 0), 411_648, 167, 56),
    FpgaResult(2**16, None, 64, QuantScheme(6, 4, 0), 821_248, 157, 57),
    FpgaResult(2**18, None, 64, QuantScheme(6, 4, 0), 3_278_848, 140, 51),
    FpgaResult(2**20, None, 64, QuantScheme(6, 4, 0), 13_109_248, 102, 38),
    FpgaResult(2**15, None, 64, QuantScheme(7, 4, 0), 444_672, 153, 57),
    FpgaResult(2**15, None, 64, QuantScheme(8, 4, 0), 477_696, 154, 57),
    FpgaResult(2**15, None, 64, QuantScheme(9, 4, 0), 510_720, 159, 59),
    FpgaResult(2**15, None, 64, QuantScheme(7, 3, 0), 411_904, 153, 57),
    FpgaResult(2**15, None, 64, QuantScheme(7, 5, 0), 477_440, 155, 57),
    FpgaResult(2**15, None, 64, QuantScheme(5, 5, 0), 411_392, 169, 63),
    FpgaResult(2**17, None, 64, QuantScheme(5, 5, 0), 1_640_192, 160, 58),
]


def fpga_report(rows: Iterable[FpgaResult] = FPGA_RESULTS) -> List[ArchReport]:
    return [
        arch_report(
            row.N,
            row.P,
            row.scheme,
            fmax=row.fmax_mhz * 1e6,
            rate=1.0 if row.rate is None else row.rate,
        )
        for row in rows
    ]


# -- output ----------------------------------------------------------------

REPORT_COLUMNS = (
    "N",
    "P",
    "scheme",
    "latency_cc",
    "llr_sram_bits",
    "psum_sram_bits",
    "rom_bits",
    "memory_bits",
    "rate",
    "fmax_mhz",
    "throughput_mbps",
    "simulated_cc",
)


def _row(report: ArchReport) -> dict:
    tp = report.throughput_bps()
    return {
        "N": report.N,
        "P": report.P,
        "scheme": str(report.scheme),
        "latency_cc": report.latency_cc,
        "llr_sram_bits": report.llr_sram_bits,
        "psum_sram_bits": report.psum_sram_bits,
        "rom_bits": report.rom_bits,
        "memory_bits": report.memory_bits,
        "rate": report.rate,
        "fmax_mhz": "" if report.fmax is None else f"{report.fmax / 1e6:g}",
        "throughput_mbps": "" if tp is None else f"{tp / 1e6:.1f}",
        "simulated_cc": "" if report.simulated_cycles is None else report.simulated_cycles,
    }


def write_report_csv(reports: Iterable[ArchReport], sink: Optional[TextIO] = None) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(_row(report))
    text = buffer.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def format_report_table(reports: Iterable[ArchReport]) -> str:
    rows = [_row(r) for r in reports]
    columns = [c for c in REPORT_COLUMNS if any(str(row[c]) != "" for row in rows)]
    widths = {
        c: max(len(c), *(len(str(row[c])) for row in rows)) if rows else len(c)
        for c in columns
    }
    lines = ["  ".join(c.rjust(widths[c]) for c in columns)]
    lines.append("=" * len(lines[0]))
    for row in rows:
        lines.append("  ".join(str(row[c]).rjust(widths[c]) for c in columns))
    return "\n".join(lines)


def format_fpga_comparison(rows: Iterable[FpgaResult] = FPGA_RESULTS) -> str:
    """Closed-form memory and throughput next to the measured values."""
    lines = [
        f"{'N':>8} {'R':>5} {'scheme':>8} {'SRAM meas.':>11} {'closed form':>11} "
        f"{'delta':>7} {'T/P meas.':>10} {'T/P formula':>11}"
    ]
    lines.append("=" * len(lines[0]))
    for row in rows:
        report = arch_report(row.N, row.P, row.scheme)
        rate = 1.0 if row.rate is None else row.rate
        formula = throughput_bps(row.N, rate, row.fmax_mhz * 1e6) / 1e6
        suffix = "R" if row.rate is None else ""
        lines.append(
            f"{row.N:>8} {'-' if row.rate is None else row.rate:>5} {str(row.scheme):>8} "
            f"{row.sram_bits:>11,} {report.memory_bits:>11,} "
            f"{report.memory_bits - row.sram_bits:>+7,} "
            f"{f'{row.throughput_mbps:g}{suffix}':>10} {f'{formula:.1f}{suffix}':>11}"
        )
    return "\n".join(lines)


def is_power_of_two(x: int) -> bool:
    return x >= 1 and not x & (x - 1)


def grid(ns: Iterable[int], ps: Iterable[int]):
    """Valid (N, P) pairs of a parameter grid, N given as log2."""
    for n in ns:
        N = 1 << n
        for P in ps:
            if is_power_of_two(P) and 2 <= P <= N // 4:
                yield N, P
