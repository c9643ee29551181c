"""CSV and gnuplot writers for error-rate curves."""

from __future__ import annotations

import csv
import io
from typing import Dict, Iterable, List, Optional, TextIO

from .montecarlo import ErrorRatePoint

RESULT_COLUMNS = ("ebn0_db", "frames", "frame_errors", "bit_errors", "fer", "ber", "ci95")


def _values(point: ErrorRatePoint) -> List[str]:
    return [
        f"{point.ebn0_db:g}",
        str(point.frames),
        str(point.frame_errors),
        str(point.bit_errors),
        f"{point.fer:.6e}",
        f"{point.ber:.6e}",
        f"{point.ci95:.6e}",
    ]


def _finish(buffer: io.StringIO, sink: Optional[TextIO]) -> str:
    text = buffer.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def write_points_csv(points: Iterable[ErrorRatePoint], sink: Optional[TextIO] = None) -> str:
    """One row per point; an empty sweep still gets the header."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for point in points:
        writer.writerow(_values(point))
    return _finish(buffer, sink)


def write_comparison_csv(
    curves: Dict[str, List[ErrorRatePoint]], sink: Optional[TextIO] = None
) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("scheme",) + RESULT_COLUMNS)
    for label, points in curves.items():
        for point in points:
            writer.writerow([label] + _values(point))
    return _finish(buffer, sink)


def write_gnuplot(curves: Dict[str, List[ErrorRatePoint]], sink: Optional[TextIO] = None) -> str:
    """
    Whitespace-separated blocks, one per curve, separated by two blank lines
    so that gnuplot can address them with ``index``.
    """
    buffer = io.StringIO()
    buffer.write("# " + " ".join(RESULT_COLUMNS) + "\n")
    for i, (label, points) in enumerate(curves.items()):
        if i:
            buffer.write("\n\n")
        buffer.write(f"# {label}\n")
        for point in points:
            buffer.write(" ".join(_values(point)) + "\n")
    return _finish(buffer, sink)
