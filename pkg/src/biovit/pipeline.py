"""Cohort pipeline: normality, descriptives, trend fits, EFGA, group tests."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import efga as efga_mod
from .efga import EfgaRecord, format_efga, make_record, retention_rate, split_groups, validate_scale
from .protocol import decode_stream
from .session import AttentionSession, SessionError, format_duration, from_packets, ingest_csv
from .stats import Direction, StatsError, anderson_darling, descriptives, mann_whitney
from .trend import TrendError, TrendModelKind, classify_shape, equation, select_model

log = logging.getLogger(__name__)

RECONSTRUCTION_NOTE = (
    "Group tests compare the Mo column with the MAPE column within each group; "
    "scale validation uses the (Mo, EFGA) item pair. Both pairings are reconstructions."
)


class PipelineError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    input_paths: list[Path] = field(default_factory=list)
    input_format: str = "csv"  # csv | capture | summary
    models: tuple[TrendModelKind, ...] = tuple(TrendModelKind)
    efga_threshold: float = efga_mod.DEFAULT_THRESHOLD
    efga_x100: bool = False
    efga_display: str = "truncate"  # truncate | round
    output_format: str = "markdown"
    confidence: float = 95.0
    item_pair: tuple[str, str] = ("Mo", "EFGA")
    seed: Optional[int] = None

    def __post_init__(self):
        if self.input_format not in ("csv", "capture", "summary"):
            raise ValueError(f"unknown input format {self.input_format!r}")
        if self.output_format not in ("markdown", "csv", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if not self.efga_threshold > 0:
            raise ValueError("efga_threshold must be positive")
        if not self.models:
            raise ValueError("at least one trend model is required")
        if self.efga_display not in ("truncate", "round"):
            raise ValueError(f"unknown EFGA display mode {self.efga_display!r}")


@dataclass
class TestReport:
    """Structured results; every list holds plain dict rows in display order."""

    __test__ = False  # not a pytest class

    normality: list[dict] = field(default_factory=list)
    descriptives: list[dict] = field(default_factory=list)
    growth: list[dict] = field(default_factory=list)
    efga_groups: dict[str, list[dict]] = field(
        default_factory=lambda: {"retained": [], "declined": []}
    )
    group_tests: list[dict] = field(default_factory=list)
    trends: list[dict] = field(default_factory=list)
    validation: Optional[dict] = None
    retention_rate: Optional[float] = None
    warnings: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    efga_display: str = "truncate"


def load_sessions(config: PipelineConfig) -> list[AttentionSession]:
    sessions = []
    for path in config.input_paths:
        path = Path(path)
        try:
            if config.input_format == "capture":
                packets, errors = decode_stream(path.read_bytes())
                if errors:
                    log.warning("%s: %d frame errors", path, len(errors))
                sessions.append(from_packets(packets, participant_id=path.stem))
            else:
                sessions.append(ingest_csv(path.read_text(encoding="utf-8"), participant_id=path.stem))
        except OSError as exc:
            raise PipelineError(f"cannot read {path}: {exc}") from exc
        except SessionError as exc:
            raise PipelineError(f"{path}: {exc}") from exc
    ids = [s.participant_id for s in sessions]
    if len(set(ids)) != len(ids):
        raise PipelineError("participant ids (file stems) must be unique")
    return sessions


def _err_row(pid: str, exc: Exception, columns: Sequence[str]) -> dict:
    row = {"participant_id": pid}
    row.update({c: None for c in columns})
    row["error"] = str(exc)
    return row


def _participant(session: AttentionSession, config: PipelineConfig, report: TestReport):
    """Fill the per-participant tables; return an EFGA record or None."""
    pid = session.participant_id
    y = session.attention
    if len(session) == 0:
        raise PipelineError(f"{pid}: empty session")

    desc = descriptives(y)
    try:
        ad = anderson_darling(y)
        report.normality.append(
            {
                "participant_id": pid,
                "mean": desc.mean,
                "std_dev": desc.std_dev,
                "n": desc.n,
                "ad_statistic": ad.statistic,
                "p_value": ad.p_value,
                "p_display": ad.p_display,
                "error": None,
            }
        )
    except StatsError as exc:
        report.warnings.append(f"{pid}: Anderson-Darling: {exc}")
        row = _err_row(pid, exc, ("mean", "std_dev", "n", "ad_statistic", "p_value", "p_display"))
        row.update(mean=desc.mean, std_dev=desc.std_dev, n=desc.n)
        report.normality.append(row)

    report.descriptives.append(
        {
            "participant_id": pid,
            "n": desc.n,
            "mean": desc.mean,
            "variance": desc.variance,
            "std_dev": desc.std_dev,
            "mode": desc.mode,
        }
    )

    t4_cols = ("mode", "mape", "mad", "msd", "duration_s", "duration")
    a2_cols = ("mode", "mape", "efga", "model", "coefficients", "equation", "equation_full",
               "shape", "band", "selected_model", "model_mape")
    try:
        sel = select_model(y, config.models)
    except TrendError as exc:
        report.warnings.append(f"{pid}: trend: {exc}")
        report.growth.append(_err_row(pid, exc, t4_cols))
        report.trends.append(_err_row(pid, exc, a2_cols))
        return None
    for kind, reason in sel.skipped.items():
        report.warnings.append(f"{pid}: {kind.value} skipped: {reason}")
    by_kind = {f.kind: f for f in sel.fits}
    main = by_kind.get(TrendModelKind.QUADRATIC) or by_kind[sel.best]
    acc = main.accuracy
    report.growth.append(
        {
            "participant_id": pid,
            "mode": desc.mode,
            "mape": acc.mape,
            "mad": acc.mad,
            "msd": acc.msd,
            "duration_s": session.duration,
            "duration": format_duration(session.duration),
            "error": None,
        }
    )

    record = None
    efga_value = None
    try:
        record = make_record(pid, desc.mode, acc.mape, config.efga_threshold, config.efga_x100)
        efga_value = record.efga
    except efga_mod.EfgaError as exc:
        report.warnings.append(f"{pid}: EFGA: {exc}")

    shape = classify_shape(main).value if main.kind is TrendModelKind.QUADRATIC else None
    report.trends.append(
        {
            "participant_id": pid,
            "mode": desc.mode,
            "mape": acc.mape,
            "efga": efga_value,
            "model": main.kind.value,
            "coefficients": list(main.coefficients),
            "equation": equation(main),
            "equation_full": equation(main, compact=False),
            "shape": shape,
            "band": record.band.value if record else None,
            "selected_model": sel.best.value,
            "model_mape": {f.kind.value: f.accuracy.mape for f in sel.fits},
            "error": None,
        }
    )
    return record


def _efga_row(r: EfgaRecord) -> dict:
    return {
        "participant_id": r.participant_id,
        "mode": r.mo,
        "mape": r.mape,
        "efga": r.efga,
        "band": r.band.value,
        "group": r.group.value,
    }


def _group_test(name: str, members: list[EfgaRecord], direction: Direction, config) -> dict:
    summary = {
        "group": name,
        "direction": direction.value,
        "n": len(members),
        "participants": [r.participant_id for r in members],
        "mode": [r.mo for r in members],
        "mape": [r.mape for r in members],
    }
    try:
        res = mann_whitney(
            [r.mo for r in members],
            [r.mape for r in members],
            direction,
            confidence=config.confidence,
        )
    except StatsError as exc:
        summary.update(error=str(exc))
        return summary
    summary.update(
        w_statistic=res.w_statistic,
        u_statistic=res.u_statistic,
        p_value=res.p_value,
        method=res.method,
        point_estimate=res.median_diff_point,
        bound=res.ci_bound,
        bound_kind="lower" if direction is Direction.GREATER else "upper",
        confidence=res.confidence,
        error=None,
    )
    return summary


def efga_sections(records: Sequence[EfgaRecord], config: PipelineConfig, report: TestReport):
    """EFGA group tables, the two group tests, scale validation and retention."""
    report.efga_display = config.efga_display
    if not records:
        report.warnings.append("no EFGA records; group analysis skipped")
        return report
    retained, declined = split_groups(records)
    report.efga_groups = {
        "retained": [_efga_row(r) for r in retained],
        "declined": [_efga_row(r) for r in declined],
    }
    report.group_tests = []
    for name, members, direction in (
        ("retained", retained, Direction.GREATER),
        ("declined", declined, Direction.LESS),
    ):
        summary = _group_test(name, members, direction, config)
        if summary.get("error"):
            report.warnings.append(f"{name} group test: {summary['error']}")
        report.group_tests.append(summary)
    try:
        v = validate_scale(records, config.item_pair)
        report.validation = {
            "items": list(v.item_names),
            "pearson_r": v.pearson_r,
            "cronbach_alpha": v.cronbach_alpha,
        }
    except (efga_mod.EfgaError, StatsError) as exc:
        report.warnings.append(f"scale validation: {exc}")
    report.retention_rate = retention_rate(records)
    report.notes.append(RECONSTRUCTION_NOTE)
    return report


def run_sessions(sessions: Sequence[AttentionSession], config: PipelineConfig) -> TestReport:
    report = TestReport(efga_display=config.efga_display)
    records = []
    for s in sessions:
        rec = _participant(s, config, report)
        if rec is not None:
            records.append(rec)
    return efga_sections(records, config, report)


def load_summary(path: Path, config: PipelineConfig) -> list[EfgaRecord]:
    """Read ``participant_id,mo,mape`` rows into EFGA records."""
    import csv

    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"participant_id", "mo", "mape"} <= set(reader.fieldnames):
            raise PipelineError(f"{path}: expected header participant_id,mo,mape")
        for line, row in enumerate(reader, start=2):
            try:
                records.append(
                    make_record(
                        row["participant_id"],
                        float(row["mo"]),
                        float(row["mape"]),
                        config.efga_threshold,
                        config.efga_x100,
                    )
                )
            except (ValueError, efga_mod.EfgaError) as exc:
                raise PipelineError(f"{path}:{line}: {exc}") from exc
    return records


def run_pipeline(config: PipelineConfig) -> TestReport:
    if not config.input_paths:
        raise PipelineError("no input files")
    if config.input_format == "summary":
        records = []
        for p in config.input_paths:
            records += load_summary(Path(p), config)
        return efga_sections(records, config, TestReport(efga_display=config.efga_display))
    sessions = load_sessions(config)
    if not sessions:
        raise PipelineError("no valid sessions")
    return run_sessions(sessions, config)


def efga_text(value: Optional[float], mode: str) -> str:
    return "" if value is None else format_efga(value, 2, mode)
