"""
Cycle trace of the architecture simulator and its CSV form.

Columns: ``cycle,unit,stage,func,mem,addr,bits``. Each memory access is one
row with ``bits`` = ``r`` or ``w``; every decided bit is one row with
``mem`` = ``out``, ``addr`` = bit index and ``bits`` = its value. Within an
event, reads come before writes, each sorted by memory then address.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, TextIO, Tuple

from ..errors import ParameterError

COLUMNS = ("cycle", "unit", "stage", "func", "mem", "addr", "bits")
UNITS = ("dec", "enc", "load")
OUT = "out"


@dataclass
class TraceEvent:
    """
    Everything one unit did in one clock cycle.

    ``func`` is ``f``, ``g``, ``fg`` (chained stage-0 PE), ``e`` (partial-sum
    encoder) or ``load``; multi-cycle activations carry the step as a suffix,
    e.g. ``f_2``. A ``load`` event may share its cycle with a dec/enc event.
    """

    cycle: int
    unit: str
    stage: Optional[int]
    func: str
    reads: List[Tuple[str, int]] = field(default_factory=list)
    writes: List[Tuple[str, int]] = field(default_factory=list)
    emitted: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def activation(self) -> Tuple[int, str, Optional[int], str]:
        return (self.cycle, self.unit, self.stage, self.func)


def activation_table(trace: Iterable[TraceEvent], units=("dec", "enc")):
    """The schedule as ``(cycle, unit, stage, func)`` tuples."""
    return [event.activation for event in trace if event.unit in units]


def _rows(event: TraceEvent):
    stage = "" if event.stage is None else event.stage
    head = (event.cycle, event.unit, stage, event.func)
    for mem, addr in sorted(event.reads):
        yield head + (mem, addr, "r")
    for mem, addr in sorted(event.writes):
        yield head + (mem, addr, "w")
    for index, value in event.emitted:
        yield head + (OUT, index, value)
    if not (event.reads or event.writes or event.emitted):
        yield head + ("", "", "")


def dump_trace(trace, sink: Optional[TextIO] = None) -> str:
    """
    Write a trace as CSV.

    ``trace`` may be a list of events or anything with a ``trace`` attribute
    (a :class:`SimResult` or a running simulator). The CSV text is returned,
    and also written to ``sink`` when given.
    """
    events = getattr(trace, "trace", trace)
    if events is None:
        raise ParameterError("no trace recorded; run the simulator with record_trace=True")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(COLUMNS)
    for event in events:
        writer.writerows(_rows(event))
    text = buffer.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def load_trace(source) -> List[TraceEvent]:
    """Parse CSV text (or a readable file) produced by :func:`dump_trace`."""
    text = source.read() if hasattr(source, "read") else source
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ParameterError(f"unexpected trace header {reader.fieldnames}")

    events: List[TraceEvent] = []
    for row in reader:
        try:
            cycle = int(row["cycle"])
            stage = int(row["stage"]) if row["stage"] != "" else None
        except ValueError as exc:
            raise ParameterError(f"malformed trace row {row}") from exc
        unit, func = row["unit"], row["func"]
        if unit not in UNITS:
            raise ParameterError(f"unknown unit {unit!r} in trace")
        if not events or events[-1].activation != (cycle, unit, stage, func):
            events.append(TraceEvent(cycle, unit, stage, func))
        event = events[-1]
        mem = row["mem"]
        if mem == "":
            continue
        if mem == OUT:
            event.emitted.append((int(row["addr"]), int(row["bits"])))
        elif row["bits"] == "r":
            event.reads.append((mem, int(row["addr"])))
        elif row["bits"] == "w":
            event.writes.append((mem, int(row["addr"])))
        else:
            raise ParameterError(f"unknown access {row['bits']!r} in trace")
    return events
