"""Render a TestReport as markdown, CSV tables or JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Callable, Optional, Sequence

from .pipeline import TestReport, efga_text

Column = tuple[str, str, Callable[[Any], str]]


def _num(digits: int) -> Callable[[Any], str]:
    def fmt(v):
        if v is None:
            return ""
        return f"{v:.{digits}f}"

    return fmt


def _mode(v) -> str:
    if v is None:
        return ""
    return str(int(v)) if float(v).is_integer() else f"{v:.3f}"


def _int(v) -> str:
    return "" if v is None else str(int(v))


def _text(v) -> str:
    return "" if v is None else str(v)


def _pct(v) -> str:
    return "" if v is None else f"{v:.2f}%"


def _p(v) -> str:
    if v is None:
        return ""
    return "<0.001" if v < 0.0005 else f"{v:.3f}"


NORMALITY_COLUMNS: list[Column] = [
    ("Variables", "participant_id", _text),
    ("Average", "mean", _num(3)),
    ("Des.Est.", "std_dev", _num(3)),
    ("Observations", "n", _int),
    ("And.Darling", "ad_statistic", _num(3)),
    ("P-value", "p_display", _p),
]
DESCRIPTIVE_COLUMNS: list[Column] = [
    ("Variable", "participant_id", _text),
    ("Observations", "n", _int),
    ("Average", "mean", _num(3)),
    ("Variance", "variance", _num(3)),
    ("Desv.Est.", "std_dev", _num(3)),
    ("M_o", "mode", _mode),
]
GROWTH_COLUMNS: list[Column] = [
    ("Variable", "participant_id", _text),
    ("M_o", "mode", _mode),
    ("MAPE", "mape", _num(3)),
    ("Mad", "mad", _num(3)),
    ("Msd", "msd", _num(3)),
    ("BIOVIT_t", "duration", _text),
]


def _efga_columns(mode: str) -> list[Column]:
    return [
        ("Variable", "participant_id", _text),
        ("M_o", "mode", _mode),
        ("MAPE", "mape", _num(2)),
        ("EFGA", "efga", lambda v: efga_text(v, mode)),
    ]


def _test_columns() -> list[Column]:
    return [
        ("Variable", "participant_id", _text),
        ("M_o", "mode", _mode),
        ("MAPE", "mape", _num(2)),
        ("N.Trust.", "confidence", _pct),
        ("IC Inf.", "bound", _num(2)),
        ("p-value", "p_value", _p),
    ]


def _trend_columns(mode: str) -> list[Column]:
    return [
        ("Variable", "participant_id", _text),
        ("M_o", "mode", _mode),
        ("MAPE", "mape", _num(2)),
        ("EFGA", "efga", lambda v: efga_text(v, mode)),
        ("Trend", "equation", _text),
        ("Shape", "shape", _text),
        ("eSense", "band", _text),
        ("Best model", "selected_model", _text),
    ]


def _test_rows(summary: dict) -> list[dict]:
    """One row per member, repeating the shared bound and p-value."""
    rows = []
    for pid, mo, mape in zip(summary["participants"], summary["mode"], summary["mape"]):
        rows.append(
            {
                "participant_id": pid,
                "mode": mo,
                "mape": mape,
                "confidence": summary.get("confidence"),
                "bound": summary.get("bound"),
                "p_value": summary.get("p_value"),
            }
        )
    return rows


def _cells(rows: Sequence[dict], cols: Sequence[Column]) -> list[list[str]]:
    out = []
    for r in rows:
        cells = [fmt(r.get(key)) for _, key, fmt in cols]
        if r.get("error"):
            cells[-1] = (cells[-1] + " " if cells[-1] else "") + f"(error: {r['error']})"
        out.append(cells)
    return out


def _md_table(title: str, rows: Sequence[dict], cols: Sequence[Column]) -> str:
    head = [c[0] for c in cols]
    lines = [f"## {title}", "", "| " + " | ".join(head) + " |"]
    lines.append("|" + "|".join("---" for _ in head) + "|")
    for cells in _cells(rows, cols):
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def tables(report: TestReport) -> list[tuple[str, str, list[dict], list[Column]]]:
    """(file stem, title, rows, columns) for every rendered table, in order."""
    mode = report.efga_display
    out = [
        ("normality", "Anderson-Darling test results", report.normality, NORMALITY_COLUMNS),
        ("descriptives", "Descriptive statistics", report.descriptives, DESCRIPTIVE_COLUMNS),
        ("growth", "Attention growth analysis", report.growth, GROWTH_COLUMNS),
        ("efga_normal_superior", "Normal-superior EFGA attention scale",
         report.efga_groups.get("retained", []), _efga_columns(mode)),
        ("efga_low", "Low EFGA attention scale",
         report.efga_groups.get("declined", []), _efga_columns(mode)),
    ]
    tests = {s["group"]: s for s in report.group_tests}
    for stem, title, group in (
        ("mann_whitney_retained", "First Mann-Whitney hypothesis test", "retained"),
        ("mann_whitney_declined", "Second Mann-Whitney hypothesis test", "declined"),
    ):
        rows = _test_rows(tests[group]) if group in tests else []
        out.append((stem, title, rows, _test_columns()))
    out.append(("quadratic_trends", "Quadratic trend analysis", report.trends, _trend_columns(mode)))
    return out


def render_markdown(report: TestReport) -> str:
    parts = ["# Attention analysis report", ""]
    for _, title, rows, cols in tables(report):
        parts.append(_md_table(title, rows, cols))
    for s in report.group_tests:
        if s.get("error") is None and "p_value" in s:
            parts.append(
                f"- {s['group']}: W = {s['w_statistic']:g}, one-sided ({s['direction']}), "
                f"p = {s['p_value']:.3g} ({s['method']}), point estimate = {s['point_estimate']:.2f}, "
                f"{s['bound_kind']} bound = {s['bound']:.2f} at {s['confidence']:.2f}%"
            )
    if report.group_tests:
        parts.append("")
    parts.append("## Scale validation")
    parts.append("")
    if report.validation:
        v = report.validation
        parts.append(
            f"Items {v['items'][0]} / {v['items'][1]}: r = {v['pearson_r']:.3f}, "
            f"standardized alpha = {v['cronbach_alpha']:.3f}"
        )
    else:
        parts.append("not available")
    parts.append("")
    rate = "" if report.retention_rate is None else f"{report.retention_rate:.1f}%"
    parts.append(f"Retention rate: {rate}")
    parts.append("")
    if report.notes:
        parts.append("## Notes")
        parts.append("")
        parts += [f"- {n}" for n in report.notes]
        parts.append("")
    if report.warnings:
        parts.append("## Warnings")
        parts.append("")
        parts += [f"- {w}" for w in report.warnings]
        parts.append("")
    return "\n".join(parts)


def render_csv_tables(report: TestReport) -> dict[str, str]:
    """One CSV document per table, keyed by file stem."""
    out = {}
    for stem, _, rows, cols in tables(report):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([c[0] for c in cols] + ["error"])
        for r, cells in zip(rows, _cells([{**r, "error": None} for r in rows], cols)):
            w.writerow(cells + [r.get("error") or ""])
        out[stem] = buf.getvalue()
    return out


def _clean(v: Any) -> Any:
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def to_dict(report: TestReport) -> dict:
    return _clean(
        {
            "normality": report.normality,
            "descriptives": report.descriptives,
            "growth": report.growth,
            "efga_groups": report.efga_groups,
            "group_tests": report.group_tests,
            "trends": report.trends,
            "validation": report.validation,
            "retention_rate": report.retention_rate,
            "efga_display": report.efga_display,
            "notes": report.notes,
            "warnings": report.warnings,
        }
    )


def render_json(report: TestReport) -> str:
    return json.dumps(to_dict(report), indent=2, ensure_ascii=False) + "\n"


def render(report: TestReport, fmt: str = "markdown") -> str:
    if fmt == "markdown":
        return render_markdown(report)
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return "\n".join(f"# {stem}\n{text}" for stem, text in render_csv_tables(report).items())
    raise ValueError(f"unknown format {fmt!r}")


def render_to(report: TestReport, fmt: str, dest: Optional[str]) -> None:
    """Write a rendered report; CSV goes to one file per table under ``dest``."""
    from pathlib import Path

    if fmt == "csv" and dest:
        d = Path(dest)
        d.mkdir(parents=True, exist_ok=True)
        for stem, text in render_csv_tables(report).items():
            (d / f"{stem}.csv").write_text(text, encoding="utf-8")
        return
    text = render(report, fmt)
    if dest:
        Path(dest).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
