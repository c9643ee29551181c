"""
Monte Carlo frame/bit error rate estimation.

Frames are grouped in fixed-size batches; batch b always holds frames
``b * batch_size ...`` with their own random streams, and the stop rule is
checked after each batch in batch order. Results therefore depend on the seed,
the configuration and ``batch_size``, never on how many workers ran.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..algorithms import get_algorithm
from ..archsim import ArchConfig, SemiParallelDecoder
from ..codebook import PolarCode
from ..errors import ParameterError
from ..numerics import QuantScheme, quantize_channel_array
from ..refdec import DecodeAlgo, SCDecoder, extract_info
from .channel import ChannelConfig, draw_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StopRule:
    min_frame_errors: int = 100
    max_frames: int = 10**7

    def __post_init__(self):
        if self.min_frame_errors < 1 or self.max_frames < 1:
            raise ParameterError(f"invalid stop rule {self}")

    def reached(self, frames: int, frame_errors: int) -> bool:
        return frame_errors >= self.min_frame_errors or frames >= self.max_frames


@dataclass(frozen=True)
class ErrorRatePoint:
    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    K: int

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.K) if self.frames else 0.0

    @property
    def ci95(self) -> float:
        """Normal-approximation half-width of the FER 95% interval."""
        if not self.frames:
            return 0.0
        return 1.96 * math.sqrt(self.fer * (1.0 - self.fer) / self.frames)


@dataclass(frozen=True)
class DecoderSpec:
    """Picklable description of the decoder a worker should build."""

    algo: str
    scheme: Optional[QuantScheme] = None
    P: Optional[int] = None

    def __post_init__(self):
        needs = get_algorithm(self.algo).dependencies
        if "scheme" in needs and self.scheme is None:
            raise ParameterError(f"{self.algo} needs a quantization scheme")
        if "p" in needs and self.P is None:
            raise ParameterError(f"{self.algo} needs the number of PEs")

    @property
    def label(self) -> str:
        algorithm = get_algorithm(self.algo)
        if algorithm.fixed_point:
            return str(self.scheme)
        return "float"


def make_decoder(code: PolarCode, spec: DecoderSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Return ``decode(llr (B, N) float) -> u_hat (B, N)`` for the selection."""
    kind = get_algorithm(spec.algo).kind
    if kind == "arch":
        sim = SemiParallelDecoder(
            ArchConfig(P=spec.P, scheme=spec.scheme, code=code), record_trace=False
        )

        def decode_arch(llr):
            raw = quantize_channel_array(llr, spec.scheme)
            return np.stack([sim.begin(frame).finish().u_hat for frame in raw])

        return decode_arch

    decoder = SCDecoder(code, DecodeAlgo(kind, spec.scheme if kind == "MSA_fixed" else None))
    if decoder.algo.fixed_point:
        return lambda llr: decoder.decode_batch(quantize_channel_array(llr, spec.scheme))
    return decoder.decode_batch


def run_batch(
    code: PolarCode, spec: DecoderSpec, channel: ChannelConfig, first: int, count: int
) -> Tuple[int, int]:
    """Frame and bit errors over frames ``first .. first + count - 1``."""
    u, llr = draw_batch(code, channel, first, count)
    u_hat = make_decoder(code, spec)(llr)
    wrong = extract_info(code, u_hat) != u
    return int(wrong.any(axis=1).sum()), int(wrong.sum())


def _batches(stop: StopRule, batch_size: int):
    first = 0
    while first < stop.max_frames:
        count = min(batch_size, stop.max_frames - first)
        yield first, count
        first += count


def run_point(
    code: PolarCode,
    spec: DecoderSpec,
    channel: ChannelConfig,
    stop_rule: StopRule = StopRule(),
    *,
    batch_size: int = 64,
    workers: int = 1,
    progress: bool = False,
) -> ErrorRatePoint:
    """Simulate one Eb/N0 point until the stop rule is met."""
    if batch_size < 1 or workers < 1:
        raise ParameterError(f"invalid batch_size={batch_size} or workers={workers}")
    frames = frame_errors = bit_errors = 0
    bar = tqdm(
        total=stop_rule.max_frames,
        desc=f"{channel.ebn0_db:g} dB {spec.label}",
        unit="frame",
        disable=not progress,
        leave=False,
    )
    batches = _batches(stop_rule, batch_size)

    def account(count: int, errors: Tuple[int, int]) -> bool:
        nonlocal frames, frame_errors, bit_errors
        frames += count
        frame_errors += errors[0]
        bit_errors += errors[1]
        bar.update(count)
        bar.set_postfix(errors=frame_errors)
        return stop_rule.reached(frames, frame_errors)

    with bar:
        if workers == 1:
            for first, count in batches:
                if account(count, run_batch(code, spec, channel, first, count)):
                    break
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                pending: deque = deque()
                stopped = False
                for first, count in batches:
                    pending.append(
                        (count, pool.submit(run_batch, code, spec, channel, first, count))
                    )
                    if len(pending) >= workers:
                        done, future = pending.popleft()
                        if account(done, future.result()):
                            stopped = True
                            break
                while pending and not stopped:
                    done, future = pending.popleft()
                    stopped = account(done, future.result())
                # speculative batches past the stop point are discarded
                for _, future in pending:
                    future.cancel()

    point = ErrorRatePoint(channel.ebn0_db, frames, frame_errors, bit_errors, code.K)
    logger.info(
        "%s @ %.2f dB: %d/%d frame errors, FER=%.3e BER=%.3e",
        spec.label,
        channel.ebn0_db,
        frame_errors,
        frames,
        point.fer,
        point.ber,
    )
    return point


def sweep(
    settings,
    code: Optional[PolarCode] = None,
    spec: Optional[DecoderSpec] = None,
    progress: bool = False,
) -> List[ErrorRatePoint]:
    """Run every Eb/N0 point of ``settings.ebn0_list``."""
    code = settings.build_code() if code is None else code
    if spec is None:
        needs = get_algorithm(settings.algo).dependencies
        spec = DecoderSpec(
            settings.algo,
            scheme=settings.scheme if "scheme" in needs else None,
            P=settings.p if "p" in needs else None,
        )
    stop = StopRule(settings.min_frame_errors, settings.max_frames)
    return [
        run_point(
            code,
            spec,
            ChannelConfig.from_settings(settings, ebn0),
            stop,
            batch_size=settings.batch_size,
            workers=settings.workers,
            progress=progress,
        )
        for ebn0 in settings.ebn0_list
    ]


def compare_quantization(
    code: PolarCode,
    schemes: Sequence[Optional[QuantScheme]],
    ebn0_list: Iterable[float],
    stop_rule: StopRule = StopRule(),
    *,
    seed: int = 0,
    batch_size: int = 64,
    workers: int = 1,
    progress: bool = False,
) -> Dict[str, List[ErrorRatePoint]]:
    """
    Min-sum error rates per quantization; ``None`` stands for floating point.
    Every scheme sees the same frames.
    """
    ebn0_list = list(ebn0_list)
    curves: Dict[str, List[ErrorRatePoint]] = {}
    for scheme in schemes:
        spec = DecoderSpec("msa") if scheme is None else DecoderSpec("msa-fixed", scheme)
        curves[spec.label] = [
            run_point(
                code,
                spec,
                ChannelConfig(ebn0, code.rate, seed),
                stop_rule,
                batch_size=batch_size,
                workers=workers,
                progress=progress,
            )
            for ebn0 in ebn0_list
        ]
    return curves


def _crossing(points: Sequence[ErrorRatePoint], target_fer: float) -> float:
    pts = sorted((p for p in points if p.frames), key=lambda p: p.ebn0_db)
    for lo, hi in zip(pts, pts[1:]):
        if lo.fer >= target_fer >= hi.fer and lo.fer > 0 and hi.fer > 0:
            if lo.fer == hi.fer:
                return lo.ebn0_db
            t = (math.log10(lo.fer) - math.log10(target_fer)) / (
                math.log10(lo.fer) - math.log10(hi.fer)
            )
            return lo.ebn0_db + t * (hi.ebn0_db - lo.ebn0_db)
    raise ParameterError(f"FER {target_fer:g} is not bracketed by the measured points")


def horizontal_gap(
    points_a: Sequence[ErrorRatePoint],
    points_b: Sequence[ErrorRatePoint],
    target_fer: float,
) -> float:
    """Eb/N0 that curve a needs beyond curve b to reach ``target_fer`` (dB)."""
    if not 0 < target_fer < 1:
        raise ParameterError(f"target FER must be in (0, 1), got {target_fer}")
    return _crossing(points_a, target_fer) - _crossing(points_b, target_fer)
