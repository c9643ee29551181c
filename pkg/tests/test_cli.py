import pytest

from polarsim.cli import format_bits, parse_bits, parse_floats, run
from polarsim.errors import ParameterError
from polarsim.harness.config import ENV_KEYS


@pytest.fixture(autouse=True)
def isolated(monkeypatch, tmp_path):
    for var in ENV_KEYS.values():
        monkeypatch.delenv(var, raising=False)
    monkeypatch.chdir(tmp_path)


def test_list_algos(capsys):
    run(["--list-algos"])
    out = capsys.readouterr().out
    assert "Available decoders" in out
    assert "(msa-fixed)" in out and "(arch)" in out


def test_no_command_prints_help(capsys):
    with pytest.raises(SystemExit) as exc:
        run([])
    assert exc.value.code == 1
    assert "usage:" in capsys.readouterr().out


def test_construct(capsys):
    run(["construct", "-n", "3", "-k", "4"])
    assert capsys.readouterr().out == "n=3 K=4\ne8\n"


def test_construct_to_file_then_encode_with_mask(capsys, tmp_path):
    run(["construct", "-n", "3", "-k", "4", "-o", "mask.txt"])
    assert "Wrote mask.txt" in capsys.readouterr().out
    assert (tmp_path / "mask.txt").read_text() == "n=3 K=4\ne8\n"
    run(["encode", "--mask", "mask.txt", "1000"])
    assert capsys.readouterr().out == "11110000\n"


def test_encode(capsys):
    run(["encode", "-n", "3", "-k", "4", "1000"])
    assert capsys.readouterr().out == "11110000\n"


def test_decode_float(capsys):
    run(["decode", "-n", "3", "-k", "4", "--algo", "msa", "--llrs", "5 5 5 5 5 5 5 5"])
    out = capsys.readouterr().out
    assert "u_hat: 00000000" in out
    assert "info:  0000" in out


def test_decode_on_architecture(capsys, tmp_path):
    # codeword of u_3 = 1 is 11110000
    (tmp_path / "llr.txt").write_text("-3,-3,-3,-3,3,3,3,3\n")
    run(["decode", "-n", "3", "-k", "4", "--algo", "arch", "-p", "2", "--llr-file", "llr.txt"])
    captured = capsys.readouterr()
    assert "info:  1000" in captured.out
    assert "17 clock cycles" in captured.err


def test_errors_exit_with_status_one(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["encode", "-n", "3", "-k", "4", "10"])
    assert exc.value.code == 1
    assert "❌" in capsys.readouterr().err

    with pytest.raises(SystemExit):
        run(["decode", "-n", "3", "-k", "4", "--llrs", "1 2 3"])
    with pytest.raises(SystemExit):
        run(["encode", "1000"])


def test_report(capsys):
    run(["report", "-n", "11", "15", "-p", "64", "--fmax", "156"])
    out = capsys.readouterr().out
    assert "88572" in out and "5276" in out
    assert "assumes P = 64" in out


def test_report_csv(capsys, tmp_path):
    run(["report", "-n", "3", "-p", "2", "--csv", "--simulate", "-o", "report.csv"])
    lines = (tmp_path / "report.csv").read_text().splitlines()
    assert lines[0].startswith("N,P,scheme,latency_cc")
    assert lines[1].endswith(",17")


def test_report_fpga(capsys):
    run(["report", "--fpga"])
    assert "411,392" in capsys.readouterr().out


def test_report_empty_grid(capsys):
    with pytest.raises(SystemExit):
        run(["report", "-n", "3", "-p", "64"])


def test_trace(capsys, tmp_path):
    run(["trace", "-n", "3", "-k", "4", "-p", "2", "--llrs", "4 4 4 4 4 4 4 4", "-o", "t.csv"])
    captured = capsys.readouterr()
    assert "cycles: 17" in captured.err
    assert "memory audit: ok" in captured.err
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[1] == "0,dec,2,f_0,ch0,0,r"


def test_trace_random_frame_without_chaining(capsys):
    run(["trace", "-n", "4", "-k", "8", "-p", "2", "--ebn0", "3", "--no-chain"])
    captured = capsys.readouterr()
    assert captured.out.startswith("cycle,unit,stage,func,mem,addr,bits\n")
    # 49 cycles chained, plus N/2
    assert "cycles: 57" in captured.err


def test_simulate(capsys):
    run(
        [
            "-q",
            "simulate",
            "-n", "4",
            "-k", "8",
            "--algo", "msa",
            "--ebn0", "1.0", "2.0",
            "--max-frames", "64",
            "--batch-size", "32",
        ]
    )
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "ebn0_db,frames,frame_errors,bit_errors,fer,ber,ci95"
    assert [line.split(",")[:2] for line in lines[1:]] == [["1", "64"], ["2", "64"]]


def test_simulate_output_does_not_depend_on_workers(tmp_path):
    args = [
        "-q",
        "simulate",
        "-n", "5",
        "-k", "16",
        "--ebn0", "0.5", "2.0",
        "--seed", "11",
        "--min-frame-errors", "10",
        "--max-frames", "256",
        "--batch-size", "16",
    ]
    run(args + ["--workers", "1", "-o", "one.csv"])
    run(args + ["--workers", "2", "-o", "two.csv"])
    assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()


def test_compare(capsys, tmp_path):
    run(
        [
            "-q",
            "compare",
            "-n", "4",
            "-k", "8",
            "--ebn0", "0", "6",
            "--max-frames", "64",
            "--schemes", "float", "(6,3,2)",
            "--gnuplot", "curves.dat",
        ]
    )
    captured = capsys.readouterr()
    assert captured.out.startswith("scheme,ebn0_db")
    assert (tmp_path / "curves.dat").read_text().startswith("# ebn0_db")
    assert "(6,3,2)" in captured.err


def test_compare_defaults_to_rate_preset(capsys):
    run(["-q", "compare", "-n", "4", "-k", "14", "--ebn0", "4", "--max-frames", "64"])
    lines = capsys.readouterr().out.splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["float", '"(6,4,0)"']


@pytest.mark.parametrize(
    "args",
    [
        ["encode", "--mask", "missing.txt", "1000"],
        ["decode", "-n", "3", "-k", "4", "--llr-file", "missing.txt"],
        ["simulate", "-n", "3", "-k", "4", "--frozen-mask", "missing.txt", "--max-frames", "64"],
    ],
)
def test_missing_files_are_reported(capsys, args):
    with pytest.raises(SystemExit) as exc:
        run(args)
    assert exc.value.code == 1
    err = capsys.readouterr().err
    assert "❌" in err and "missing.txt" in err


def test_bit_and_number_parsing():
    assert format_bits(parse_bits("1,0 1")) == "101"
    assert list(parse_floats("1, -2.5 3")) == [1.0, -2.5, 3.0]
    with pytest.raises(ParameterError):
        parse_bits("102")
    with pytest.raises(ParameterError):
        parse_floats("1 two")
