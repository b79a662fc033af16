"""CSV / markdown tables and JSON-lines traces."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..core import IterationRecord

__all__ = ["emit_report", "parse_report_csv", "write_trace", "read_trace", "COLUMNS"]

COLUMNS = ("method", "eps", "it", "reference_it", "ratio")
NOT_REACHED = "-"


def _fmt_eps(eps: float) -> str:
    return format(eps, "g")


def _fmt_opt(v) -> str:
    return NOT_REACHED if v is None else str(v)


def _fmt_ratio(r: Optional[float]) -> str:
    return NOT_REACHED if r is None else f"{r:.3f}"


def _lines(rows) -> list[tuple[str, ...]]:
    out = []
    for row in rows:
        for e in row.entries:
            out.append((row.method, _fmt_eps(e.eps), _fmt_opt(e.it), _fmt_opt(e.reference_it), _fmt_ratio(e.ratio)))
    return out


def emit_report(rows: Sequence, format: str = "csv") -> str:
    """Render table rows, one line per (method, eps) entry.

    Unreached entries and missing references print as ``-``.
    """
    if not rows:
        raise ValueError("no rows to report")
    lines = _lines(rows)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(lines)
        return buf.getvalue()
    if format == "markdown":
        out = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
        out += ["| " + " | ".join(line) + " |" for line in lines]
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown report format {format!r}; use csv or markdown")


def parse_report_csv(text: str) -> list:
    """Inverse of ``emit_report(rows, "csv")`` (ratios are recomputed, not read)."""
    from .experiment import TableEntry, TableRow

    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    grouped: dict[str, list] = {}
    for rec in reader:
        it = None if rec["it"] == NOT_REACHED else int(rec["it"])
        ref = None if rec["reference_it"] == NOT_REACHED else int(rec["reference_it"])
        grouped.setdefault(rec["method"], []).append(TableEntry(float(rec["eps"]), it, ref))
    return [TableRow(method, tuple(entries)) for method, entries in grouped.items()]


_FIELDS = [f.name for f in dataclasses.fields(IterationRecord)]


def _record_line(rec: IterationRecord) -> str:
    doc = {}
    for name in _FIELDS:
        v = getattr(rec, name)
        doc[name] = list(v) if name == "events" else v
    return json.dumps(doc)


def write_trace(trace: Iterable[IterationRecord], path) -> None:
    """One JSON object per line, keys in :class:`IterationRecord` field order.

    Floats are written with ``repr`` precision (non-finite values as
    ``NaN``/``Infinity``), so replaying a run reproduces the file byte
    for byte.
    """
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for rec in trace:
                fh.write(_record_line(rec))
                fh.write("\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write trace: {exc.strerror}", str(path)) from exc


def read_trace(path) -> list[IterationRecord]:
    rows = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            doc = json.loads(line)
            doc["events"] = tuple(doc["events"])
            rows.append(IterationRecord(**doc))
    return rows


def context_table(which: str) -> str:
    """Published columns without a runnable counterpart, as markdown."""
    from .experiment import REFERENCE_CONTEXT

    lines = ["| method | eps | it |", "|---|---|---|"]
    for method, pairs in REFERENCE_CONTEXT[which].items():
        lines += [f"| {method} | {_fmt_eps(eps)} | {it} |" for eps, it in pairs]
    return "\n".join(lines) + "\n"
