import pytest

from polarsim.errors import ParameterError
from polarsim.metrics import (
    FPGA_RESULTS,
    REPORT_COLUMNS,
    arch_report,
    baseline_latency_cycles,
    chaining_saving_cycles,
    consistency_check,
    encoder_overhead_cycles,
    format_fpga_comparison,
    format_report_table,
    fpga_report,
    grid,
    latency_cycles,
    llr_sram_bits,
    psum_sram_bits,
    rom_bits,
    throughput_bps,
    write_report_csv,
)
from polarsim.numerics import QuantScheme


def test_latency_of_reference_configurations():
    assert latency_cycles(2**15, 64) == 88_572
    assert latency_cycles(2**11, 64) == 5_276
    assert latency_cycles(8, 2) == 17


def test_latency_breakdown():
    check = consistency_check(2**15, 64)
    assert check.baseline == baseline_latency_cycles(2**15, 64) == 69_120
    assert check.chaining_saving == chaining_saving_cycles(2**15) == 16_384
    assert check.encoder_overhead == encoder_overhead_cycles(2**15, 64) == 35_836
    assert check.ok
    assert check.overhead_ratio == pytest.approx(0.6795, abs=1e-4)


def test_breakdown_identity_holds_everywhere():
    for N, P in grid(range(3, 21), [2**k for k in range(1, 19)]):
        assert consistency_check(N, P).ok, (N, P)


def test_latency_trends():
    N = 2**15
    by_p = [latency_cycles(N, P) for P in (2**k for k in range(1, 14))]
    assert all(a > b for a, b in zip(by_p, by_p[1:]))
    by_n = [latency_cycles(2**n, 64) for n in range(8, 21)]
    assert all(a < b for a, b in zip(by_n, by_n[1:]))


def test_llr_memory():
    assert llr_sram_bits(2**15, 64, q=5, qc=5) == 329_280
    assert llr_sram_bits(2**15, 64, QuantScheme(6, 3, 2)) == 428_544
    with pytest.raises(ParameterError):
        llr_sram_bits(2**15, 64)


def test_psum_memory_and_rom():
    assert psum_sram_bits(2**15, 64) == 49_664
    assert psum_sram_bits(8, 2) == 8
    assert rom_bits(2**15) == 32_768


def test_throughput():
    assert throughput_bps(2**16, 1.0, 157e6) / 1e6 == pytest.approx(57.4, abs=0.05)
    assert throughput_bps(2**15, 0.5, 156e6) / 1e6 == pytest.approx(28.9, abs=0.05)
    assert throughput_bps(2**20, 1.0, 102e6) / 1e6 == pytest.approx(35.7, abs=0.05)
    with pytest.raises(ParameterError):
        throughput_bps(2**15, 0.0, 1e6)


@pytest.mark.parametrize("N,P", [(12, 2), (16, 3), (16, 8), (16, 1)])
def test_invalid_geometry(N, P):
    with pytest.raises(ParameterError):
        latency_cycles(N, P)


def test_arch_report_against_simulation():
    report = arch_report(256, 4, QuantScheme(6, 3, 2), simulate=True)
    assert report.simulated_cycles == report.latency_cc == latency_cycles(256, 4)
    assert report.throughput_bps() is None


def test_fpga_memory_delta():
    report = arch_report(2**15, 64, QuantScheme(5, 5, 0), fmax=169e6)
    assert report.memory_bits == 411_712
    measured = next(r for r in FPGA_RESULTS if r.scheme == QuantScheme(5, 5, 0) and r.N == 2**15)
    assert report.memory_bits - measured.sram_bits == 320
    assert len(fpga_report()) == len(FPGA_RESULTS) == 14
    assert "+320" in format_fpga_comparison()


def test_report_csv_and_table():
    reports = [arch_report(N, P, QuantScheme(6, 3, 2)) for N, P in grid([11, 15], [64])]
    text = write_report_csv(reports)
    lines = text.splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS)
    assert lines[1].startswith("2048,64,\"(6,3,2)\",5276,")
    assert len(lines) == 3
    table = format_report_table(reports)
    assert "88572" in table
    assert "fmax_mhz" not in table


def test_grid_skips_invalid_pairs():
    assert list(grid([3, 4], [2, 4, 6])) == [(8, 2), (16, 2), (16, 4)]


def test_encoder_overhead_ratio_near_two_thirds():
    for n in range(12, 19):
        ratio = consistency_check(2**n, 64).overhead_ratio
        assert ratio == pytest.approx(0.67, abs=0.02), n


def test_formulas_grow_with_n():
    scheme = QuantScheme(6, 3, 2)
    for P in (2, 16, 64):
        rows = [arch_report(N, P, scheme) for N, _ in grid(range(3, 21), [P])]
        for small, large in zip(rows, rows[1:]):
            assert small.latency_cc <= large.latency_cc
            assert small.llr_sram_bits <= large.llr_sram_bits
            assert small.psum_sram_bits <= large.psum_sram_bits
            assert small.rom_bits <= large.rom_bits


def test_degenerate_word_width():
    assert llr_sram_bits(1024, 64, q=0, qc=0) == 0
