"""Report rows and deterministic CSV/JSON writers.

The CSV schema is fixed: analysis, spec, index, value, verdict.  Rows are
sorted by (analysis, spec, index) before writing and all values are exact
decimal strings, so two runs with the same manifest and seed produce
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

CSV_COLUMNS = ("analysis", "spec", "index", "value", "verdict")


@dataclass(frozen=True)
class ReportRow:
    analysis: str
    spec: str
    index: int | str
    value: str
    verdict: str = ""


def sort_rows(rows: list[ReportRow]) -> list[ReportRow]:
    return sorted(rows, key=lambda r: (r.analysis, r.spec, str(r.index).rjust(8, "0")
                                       if isinstance(r.index, int) or str(r.index).isdigit()
                                       else str(r.index)))


def rows_to_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sort_rows(rows):
        w.writerow([r.analysis, r.spec, r.index, r.value, r.verdict])
    return buf.getvalue()


def report_to_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def write_reports(rows: list[ReportRow], summary: dict, out_dir, formats=("csv", "json"),
                  stem: str = "report") -> list[str]:
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = out / f"{stem}.csv"
        p.write_text(rows_to_csv(rows), encoding="utf-8")
        written.append(str(p))
    if "json" in formats:
        p = out / f"{stem}.json"
        p.write_text(report_to_json(summary), encoding="utf-8")
        written.append(str(p))
    return written
