"""Render bench reports as CSV or Markdown bytes."""

from __future__ import annotations

import csv
import io

from ..errors import UnknownFormat
from ..models import OpCounters, OpsReport, OutputFormat, SizeReport, SizeRow, TimingReport

SIZE_COLUMNS = ["component", "n_g1", "n_g2", "n_zq", "bytes"]
TIMING_COLUMNS = ["n_users", "enc_ms_median", "query_ms_median", "trials"]
OPS_COLUMNS = ["op_kind", *OpCounters.model_fields, "verified"]

Report = SizeReport | TimingReport | OpsReport


def _size_cells(row: SizeRow) -> list[str]:
    return [row.component, str(row.n_g1), str(row.n_g2), str(row.n_zq), str(row.nbytes)]


def _tables(report: Report) -> list[tuple[str | None, list[str], list[list[str]], list[str]]]:
    """(title, header, rows, footnotes) for every table the report renders to."""
    if isinstance(report, SizeReport):
        rows = [_size_cells(r) for r in report.rows]
        rows.append(["Total", "", "", "", str(report.total_bytes)])
        tables = [(f"{report.scheme} ({report.model.mode.value})", SIZE_COLUMNS, rows, list(report.flags))]
        for scheme, published in report.published_rows.items():
            notes = sorted({r.note for r in published if r.note})
            tables.append((scheme, SIZE_COLUMNS, [_size_cells(r) for r in published], notes))
        return tables
    if isinstance(report, TimingReport):
        rows = [
            [str(r.n_users), f"{r.enc_ms_median:.3f}", f"{r.query_ms_median:.3f}", str(r.trials)]
            for r in report.rows
        ]
        return [(None, TIMING_COLUMNS, rows, [])]
    if isinstance(report, OpsReport):
        rows = []
        for r in report.rows:
            counts = [str(getattr(r.counters, name)) for name in OpCounters.model_fields]
            verified = "" if r.verified is None else ("yes" if r.verified else "NO")
            rows.append([r.op_kind.value, *counts, verified])
        return [(None, OPS_COLUMNS, rows, [])]
    raise TypeError(f"cannot render {type(report).__name__}")


def _csv(tables: list[tuple[str | None, list[str], list[list[str]], list[str]]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for i, (title, header, rows, notes) in enumerate(tables):
        if i:
            buf.write("\n")
        if title is not None and len(tables) > 1:
            buf.write(f"# {title}\n")
        writer.writerow(header)
        writer.writerows(rows)
        for note in notes:
            buf.write(f"# {note}\n")
    return buf.getvalue()


def _markdown(tables: list[tuple[str | None, list[str], list[list[str]], list[str]]]) -> str:
    lines: list[str] = []
    for title, header, rows, notes in tables:
        if lines:
            lines.append("")
        if title is not None:
            lines.extend([f"### {title}", ""])
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "|".join("---" for _ in header) + "|")
        lines.extend("| " + " | ".join(cells) + " |" for cells in rows)
        if notes:
            lines.append("")
            lines.extend(f"> {note}" for note in notes)
    return "\n".join(lines) + "\n"


def emit_table(report: Report, format: OutputFormat | str) -> bytes:
    """Deterministic CSV/Markdown rendering of a bench report."""
    try:
        fmt = OutputFormat(format)
    except ValueError as exc:
        raise UnknownFormat(f"unknown output format {format!r} (expected csv or markdown)") from exc
    tables = _tables(report)
    text = _csv(tables) if fmt is OutputFormat.CSV else _markdown(tables)
    return text.encode("utf-8")
