import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .algorithms import ALGORITHMS, get_algorithm, preset_for_rate
from .archsim import ArchConfig, MemoryModel, dump_trace, simulate_decode
from .codebook import (
    construct_code,
    design_param_from_ebn0,
    encode,
    load_frozen_mask,
    save_frozen_mask,
)
from .errors import ParameterError, PolarSimError
from .harness import (
    ChannelConfig,
    StopRule,
    compare_quantization,
    draw_frame,
    horizontal_gap,
    load_settings,
    sweep,
    write_comparison_csv,
    write_gnuplot,
    write_points_csv,
)
from .metrics import (
    THROUGHPUT_P,
    arch_report,
    consistency_check,
    format_fpga_comparison,
    format_report_table,
    grid,
    write_report_csv,
)
from .numerics import QuantScheme, quantize_channel_array
from .refdec import DecodeAlgo, extract_info, sc_decode


def parse_bits(text: str) -> np.ndarray:
    text = text.replace(",", "").replace(" ", "")
    if not text or set(text) - {"0", "1"}:
        raise ParameterError(f"expected a string of 0/1, got {text!r}")
    return np.array([int(c) for c in text], dtype=np.uint8)


def format_bits(bits) -> str:
    return "".join(str(int(b)) for b in bits)


def parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ParameterError(f"cannot parse numbers from {text!r}") from exc


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc.strerror or exc}") from exc


def build_code(args):
    if getattr(args, "mask", None):
        return load_frozen_mask(read_text(args.mask))
    if args.n is None or args.k is None:
        raise ParameterError("give either --mask or both -n and -k")
    if getattr(args, "design_ebn0", None) is not None:
        design = design_param_from_ebn0(args.design_ebn0, args.k / (1 << args.n))
    else:
        design = args.design_param
    return construct_code(args.n, args.k, design)


def resolve_scheme(args, code) -> QuantScheme:
    if getattr(args, "scheme", None):
        return QuantScheme.parse(args.scheme)
    return preset_for_rate(float(code.rate))


def write_output(text: str, path):
    if path:
        Path(path).write_text(text, encoding="utf-8")
        print(f"📁 Wrote {path}")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def add_code_args(parser):
    parser.add_argument("-n", type=int, help="log2 of the code length")
    parser.add_argument("-k", type=int, help="number of information bits")
    parser.add_argument("--mask", help="frozen-mask file written by 'construct'")
    parser.add_argument(
        "--design-param",
        type=float,
        default=0.5,
        help="Bhattacharyya parameter used for construction (default 0.5)",
    )
    parser.add_argument("--design-ebn0", type=float, help="design at this Eb/N0 (dB) instead")


def add_settings_args(parser):
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("-n", type=int, help="log2 of the code length")
    parser.add_argument("-k", type=int, help="number of information bits")
    parser.add_argument("-p", type=int, help="number of PEs (arch only)")
    parser.add_argument("--qi", type=int)
    parser.add_argument("--qic", type=int)
    parser.add_argument("--qf", type=int)
    parser.add_argument("--ebn0", nargs="+", type=float, dest="ebn0_list")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--min-frame-errors", type=int)
    parser.add_argument("--max-frames", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--design-param", type=float)
    parser.add_argument("--frozen-mask", help="use this mask instead of constructing")
    parser.add_argument("-o", "--output", help="CSV output path (default: stdout)")
    parser.add_argument("--gnuplot", help="also write a gnuplot data file")


def settings_from(args):
    keys = (
        "n k p qi qic qf ebn0_list seed min_frame_errors max_frames batch_size "
        "workers design_param frozen_mask output"
    ).split()
    overrides = {key: getattr(args, key, None) for key in keys}
    if getattr(args, "algo", None):
        overrides["algo"] = args.algo
    return load_settings(args.config, overrides)


# -- subcommands -------------------------------------------------------------


def cmd_construct(args):
    code = build_code(args)
    print(f"🔧 Constructed {code!r}", file=sys.stderr)
    write_output(save_frozen_mask(code), args.output)


def cmd_encode(args):
    code = build_code(args)
    print(format_bits(encode(code, parse_bits(args.bits))))


def _read_llrs(args) -> np.ndarray:
    if args.llr_file:
        return parse_floats(read_text(args.llr_file))
    if args.llrs:
        return parse_floats(args.llrs)
    raise ParameterError("give --llrs or --llr-file")


def cmd_decode(args):
    code = build_code(args)
    llrs = _read_llrs(args)
    if llrs.shape != (code.N,):
        raise ParameterError(f"expected {code.N} LLRs, got {llrs.size}")
    algorithm = get_algorithm(args.algo)
    if algorithm.kind == "arch":
        scheme = resolve_scheme(args, code)
        result = simulate_decode(
            ArchConfig(P=args.p, scheme=scheme, code=code),
            quantize_channel_array(llrs, scheme),
            record_trace=False,
        )
        u_hat = result.u_hat
        print(f"⏱️  {result.cycles} clock cycles", file=sys.stderr)
    elif algorithm.fixed_point:
        scheme = resolve_scheme(args, code)
        u_hat = sc_decode(code, quantize_channel_array(llrs, scheme), DecodeAlgo.msa_fixed(scheme))
    else:
        u_hat = sc_decode(code, llrs, DecodeAlgo(algorithm.kind))
    print(f"u_hat: {format_bits(u_hat)}")
    print(f"info:  {format_bits(extract_info(code, u_hat))}")


def cmd_trace(args):
    code = build_code(args)
    scheme = resolve_scheme(args, code)
    cfg = ArchConfig(P=args.p, scheme=scheme, code=code)
    if args.llrs or args.llr_file:
        llrs = _read_llrs(args)
    else:
        channel = ChannelConfig(args.ebn0, code.rate, args.seed)
        _, llrs = draw_frame(code, channel, args.frame)
    result = simulate_decode(
        cfg, quantize_channel_array(llrs, scheme), chained=not args.no_chain
    )
    audit = MemoryModel(cfg.N, cfg.P, cfg.scheme).audit(result.trace)
    print(f"\n🧮 N={cfg.N}, P={cfg.P}, scheme {scheme}", file=sys.stderr)
    print("=" * 40, file=sys.stderr)
    print(f"  • cycles: {result.cycles}", file=sys.stderr)
    print(
        f"  • decoder / encoder cycles: {result.decoder_cycles} / {result.encoder_cycles}",
        file=sys.stderr,
    )
    print(f"  • memory audit: {'ok' if audit.ok else 'FAILED'}", file=sys.stderr)
    write_output(dump_trace(result), args.output)


def cmd_simulate(args):
    settings = settings_from(args)
    points = sweep(settings, progress=not args.quiet and sys.stderr.isatty())
    write_output(write_points_csv(points), settings.output)
    if args.gnuplot:
        label = get_algorithm(settings.algo).name
        write_output(write_gnuplot({label: points}), args.gnuplot)


def cmd_compare(args):
    settings = settings_from(args)
    code = settings.build_code()
    if args.schemes:
        schemes = [None if s.lower() == "float" else QuantScheme.parse(s) for s in args.schemes]
    else:
        schemes = [None, settings.scheme]
    curves = compare_quantization(
        code,
        schemes,
        settings.ebn0_list,
        StopRule(settings.min_frame_errors, settings.max_frames),
        seed=settings.seed,
        batch_size=settings.batch_size,
        workers=settings.workers,
        progress=not args.quiet and sys.stderr.isatty(),
    )
    write_output(write_comparison_csv(curves), settings.output)
    if args.gnuplot:
        write_output(write_gnuplot(curves), args.gnuplot)
    if "float" in curves:
        for label, points in curves.items():
            if label == "float":
                continue
            try:
                gap = horizontal_gap(points, curves["float"], args.target_fer)
            except ParameterError as exc:
                print(f"  • {label}: {exc}", file=sys.stderr)
            else:
                print(
                    f"  • {label}: {gap:+.3f} dB from float MSA at FER {args.target_fer:g}",
                    file=sys.stderr,
                )


def cmd_report(args):
    if args.fpga:
        print(format_fpga_comparison())
        return
    scheme = QuantScheme.parse(args.scheme)
    fmax = args.fmax * 1e6 if args.fmax else None
    reports = [
        arch_report(N, P, scheme, fmax=fmax, rate=args.rate, simulate=args.simulate)
        for N, P in grid(args.n, args.p)
    ]
    if not reports:
        raise ParameterError("no valid (N, P) pair in the grid (need 2 <= P <= N/4)")
    if args.csv:
        write_output(write_report_csv(reports), args.output)
        return
    print(f"\n📊 Closed-form characteristics, scheme {scheme}")
    if fmax:
        print(f"   (throughput estimate assumes P = {THROUGHPUT_P})")
    print(format_report_table(reports))
    for report in reports:
        check = consistency_check(report.N, report.P)
        if not check.ok:
            print(f"❌ latency components do not add up for N={report.N}, P={report.P}")


def list_algorithms():
    print("\n🚀 Available decoders:")
    print("=" * 50)
    for i, (key, algorithm) in enumerate(ALGORITHMS.items(), 1):
        print(f"{i}. {algorithm.name} ({key})")
        print(f"   {algorithm.description}")
        if algorithm.dependencies:
            print(f"   Needs: {', '.join(algorithm.dependencies)}")
        print()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polarsim",
        description="Model, simulate and evaluate a semi-parallel SC polar decoder.",
    )
    parser.add_argument(
        "--list-algos", action="store_true", help="List available decoders and exit"
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-q", "--quiet", action="store_true", help="No progress bars")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("construct", help="Build a code and write its frozen mask")
    add_code_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("encode", help="Encode information bits")
    add_code_args(p)
    p.add_argument("bits", help="K information bits, e.g. 1011")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="Decode one frame of channel LLRs")
    add_code_args(p)
    p.add_argument("--llrs", help="N comma- or space-separated LLRs")
    p.add_argument("--llr-file")
    p.add_argument("--algo", default="msa-fixed", choices=list(ALGORITHMS))
    p.add_argument("--scheme", help="(qi,qic,qf), default: preset for the rate")
    p.add_argument("-p", type=int, default=64, help="number of PEs (arch)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("trace", help="Run the architecture simulator and dump its trace")
    add_code_args(p)
    p.add_argument("-p", type=int, required=True, help="number of PEs")
    p.add_argument("--scheme")
    p.add_argument("--llrs")
    p.add_argument("--llr-file")
    p.add_argument("--ebn0", type=float, default=2.0, help="channel for a random frame")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--no-chain", action="store_true", help="two-cycle stage 0 (diagnostic)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("simulate", help="Monte Carlo error-rate sweep")
    add_settings_args(p)
    p.add_argument("--algo", choices=list(ALGORITHMS))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="Compare quantization schemes against float MSA")
    add_settings_args(p)
    p.add_argument(
        "--schemes",
        nargs="+",
        help="'float' or (qi,qic,qf); default: float and the preset for the rate",
    )
    p.add_argument("--target-fer", type=float, default=1e-2)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="Latency, memory and throughput table")
    p.add_argument("-n", nargs="+", type=int, default=[10, 15, 20], help="log2 N values")
    p.add_argument("-p", nargs="+", type=int, default=[64])
    p.add_argument("--scheme", default="(6,3,2)")
    p.add_argument("--fmax", type=float, help="clock in MHz for the throughput column")
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--simulate", action="store_true", help="check latency by simulation")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--fpga", action="store_true", help="compare with measured FPGA rows")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_report)
    return parser


def run(argv=None):
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    if args.list_algos:
        list_algorithms()
        return
    if not args.command:
        parser.print_help()
        sys.exit(1)

    try:
        args.func(args)
    except PolarSimError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        sys.exit(1)
