"""
Reporting Service - deterministic CSV tables and run reports
"""

import csv
import logging
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, TextIO

from ..core.config import settings
from ..core.errors import InvalidParameter
from ..schemas.analysis import RunReport
from .field import StateField

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("text", "json-lines")


def format_cell(value: Any) -> str:
    """Floats with CSV_DIGITS significant digits, everything else via str"""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.{settings.CSV_DIGITS}g}"
    if hasattr(value, "item"):
        return format_cell(value.item())
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """
    Write a header row plus formatted rows

    Identical input produces byte-identical files.

    Returns:
        Number of data rows written
    """
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with target.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row {count} has {len(row)} cells, header has {len(header)}")
            writer.writerow([format_cell(cell) for cell in row])
            count += 1
    logger.info(f"Wrote {count} rows to {target}")
    return count


def render_text(report: RunReport) -> str:
    """Human-readable report"""
    lines = [f"{report.command}: {report.verdict.value.upper()}"]
    if report.tolerance is not None:
        lines.append(f"  tolerance: {report.tolerance:.3e}")
    for key, value in report.metrics.items():
        lines.append(f"  {key}: {format_cell(float(value))}")
    for key, value in report.provenance.items():
        lines.append(f"  {key} = {value}")
    for note in report.notes:
        lines.append(f"  note: {note}")
    for output in report.outputs:
        lines.append(f"  wrote {output}")
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, fmt: str = "text", stream: Optional[TextIO] = None) -> str:
    """
    Write a report as text or as one JSON object per line

    Returns:
        The emitted text
    """
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {fmt!r}")
    text = report.model_dump_json() + "\n" if fmt == "json-lines" else render_text(report)
    (stream or sys.stdout).write(text)
    return text


def read_field_csv(path: str) -> StateField:
    """
    Field from a CSV with columns x,u,v and an optional flag column

    Accepts the files written for hodograph sweeps and evolutions.
    """
    with Path(path).open(newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    if not rows:
        raise InvalidParameter(f"field file {path} has no rows")
    missing = {"x", "u", "v"} - set(rows[0])
    if missing:
        raise InvalidParameter(f"field file {path} lacks columns", context={"missing": ", ".join(sorted(missing))})
    try:
        xs = [float(row["x"]) for row in rows]
        us = [float(row["u"]) for row in rows]
        vs = [float(row["v"]) for row in rows]
    except ValueError as e:
        raise InvalidParameter(f"field file {path} holds a non-numeric value: {e}")
    flags = [row["flag"] for row in rows] if "flag" in rows[0] else None
    logger.info(f"Read {len(rows)} cells from {path}")
    return StateField.from_grid(xs, us, vs, flags=flags)
