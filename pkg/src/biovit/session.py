"""Per-participant attention series: band labels, CSV persistence, packet ingestion."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Any, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .protocol import DataPacket

CSV_COLUMNS = ("t", "seconds", "attention", "meditation", "poor_signal")


class SessionError(ValueError):
    """Raised for malformed or empty session input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EsenseBand(enum.Enum):
    LOW = "Low"
    NORMAL = "Normal"
    SUPERIOR = "Superior"


def classify_band(score: float) -> EsenseBand:
    """Map a 0-100 eSense score to its band. Score 0 (no signal) counts as Low."""
    if not 0 <= score <= 100:
        raise ValueError(f"eSense score out of range: {score}")
    if score < 40:
        return EsenseBand.LOW
    if score <= 60:
        return EsenseBand.NORMAL
    return EsenseBand.SUPERIOR


def format_duration(seconds: float) -> str:
    """Render seconds in the minutes.seconds notation (337 s -> ``5.37``)."""
    total = int(round(seconds))
    return f"{total // 60}.{total % 60:02d}"


def parse_duration(text: str) -> float:
    """Inverse of :func:`format_duration`; ``"3"`` means three whole minutes."""
    minutes, _, secs = text.strip().partition(".")
    secs = (secs + "00")[:2] if secs else "00"
    if int(secs) >= 60:
        raise ValueError(f"seconds field out of range in {text!r}")
    return float(int(minutes) * 60 + int(secs))


class AttentionSample(NamedTuple):
    t: int
    seconds: float
    attention: float
    meditation: Optional[int] = None
    poor_signal: Optional[int] = None


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AttentionSession:
    """An immutable 1 Hz attention series.

    Columns are stored as read-only numpy arrays; the regressor ``t`` is the
    1-based sample index and is implied by position.
    """

    participant_id: str
    seconds: np.ndarray
    attention: np.ndarray
    meditation: Optional[np.ndarray] = None
    poor_signal: Optional[np.ndarray] = None
    duration_s: Optional[float] = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        att = np.asarray(self.attention, dtype=np.float64)
        secs = np.asarray(self.seconds, dtype=np.float64)
        if att.ndim != 1 or secs.shape != att.shape:
            raise SessionError("seconds and attention must be 1-D and aligned")
        if att.size and (np.any(att < 0) or np.any(att > 100) or not np.all(np.isfinite(att))):
            raise SessionError("attention values must lie in [0, 100]")
        if secs.size and (secs[0] < 0 or np.any(np.diff(secs) < 0)):
            raise SessionError("seconds must be nonnegative and nondecreasing")
        object.__setattr__(self, "attention", _readonly(att))
        object.__setattr__(self, "seconds", _readonly(secs))
        for name, hi in (("meditation", 100), ("poor_signal", 200)):
            col = getattr(self, name)
            if col is None:
                continue
            col = np.asarray(col, dtype=np.float64)
            if col.shape != att.shape:
                raise SessionError(f"{name} column misaligned")
            if col.size and (np.any(col < 0) or np.any(col > hi)):
                raise SessionError(f"{name} values must lie in [0, {hi}]")
            object.__setattr__(self, name, _readonly(col))
        if self.duration_s is not None and secs.size and self.duration_s < secs[-1]:
            raise SessionError("duration shorter than the last sample")

    def __len__(self) -> int:
        return self.attention.size

    def __eq__(self, other):
        if not isinstance(other, AttentionSession):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return np.array_equal(a, b)

        return (
            self.participant_id == other.participant_id
            and same(self.seconds, other.seconds)
            and same(self.attention, other.attention)
            and same(self.meditation, other.meditation)
            and same(self.poor_signal, other.poor_signal)
        )

    __hash__ = None

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, len(self) + 1, dtype=np.float64)

    @property
    def duration(self) -> float:
        """Session length in seconds."""
        last = float(self.seconds[-1]) if len(self) else 0.0
        return max(self.duration_s or 0.0, last)

    @property
    def samples(self) -> list[AttentionSample]:
        med = self.meditation
        ps = self.poor_signal
        return [
            AttentionSample(
                i + 1,
                float(self.seconds[i]),
                float(self.attention[i]),
                None if med is None else int(med[i]),
                None if ps is None else int(ps[i]),
            )
            for i in range(len(self))
        ]

    @classmethod
    def from_samples(cls, participant_id: str, samples: Sequence[AttentionSample], **kw):
        for i, s in enumerate(samples):
            if s.t != i + 1:
                raise SessionError(f"sample index {s.t} at position {i + 1} is not contiguous")

        def column(name):
            vals = [getattr(s, name) for s in samples]
            if all(v is None for v in vals):
                return None
            if any(v is None for v in vals):
                raise SessionError(f"column {name} partially missing")
            return vals

        return cls(
            participant_id,
            seconds=[s.seconds for s in samples],
            attention=[s.attention for s in samples],
            meditation=column("meditation"),
            poor_signal=column("poor_signal"),
            **kw,
        )


def _parse_int(text: str, name: str, lo: int, hi: int, line: int) -> int:
    try:
        v = int(text)
    except ValueError:
        raise SessionError(f"{name} is not an integer: {text!r}", line) from None
    if not lo <= v <= hi:
        raise SessionError(f"{name}={v} outside [{lo}, {hi}]", line)
    return v


def _parse_attention(text: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise SessionError(f"attention is not a number: {text!r}", line) from None
    if not 0 <= v <= 100:
        raise SessionError(f"attention={text} outside [0, 100]", line)
    return v


def _fmt_value(v: float) -> str:
    # integers unpadded; fractional values use the shortest exact repr
    return str(int(v)) if v.is_integer() else repr(v)


def ingest_csv(text: str | io.TextIOBase, participant_id: str = "") -> AttentionSession:
    """Parse ``t,seconds,attention[,meditation][,poor_signal]`` CSV text."""
    handle = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(handle)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SessionError("empty input", 1) from None
    if header[:3] != ["t", "seconds", "attention"] or not set(header[3:]) <= {
        "meditation",
        "poor_signal",
    } or len(set(header)) != len(header):
        raise SessionError(f"unexpected header {header}", 1)
    idx = {name: k for k, name in enumerate(header)}

    t_col: list[int] = []
    secs: list[float] = []
    att: list[int] = []
    med: list[int] = []
    poor: list[int] = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise SessionError(f"expected {len(header)} fields, got {len(row)}", line)
        t = _parse_int(row[0], "t", 1, 2**62, line)
        if t != len(t_col) + 1:
            raise SessionError(f"t={t} breaks the contiguous 1..N index", line)
        try:
            s = float(row[1])
        except ValueError:
            raise SessionError(f"seconds is not a number: {row[1]!r}", line) from None
        if not np.isfinite(s) or s < 0 or (secs and s < secs[-1]):
            raise SessionError(f"seconds={row[1]} must be finite, >= 0 and nondecreasing", line)
        t_col.append(t)
        secs.append(s)
        att.append(_parse_attention(row[2], line))
        if "meditation" in idx:
            med.append(_parse_int(row[idx["meditation"]], "meditation", 0, 100, line))
        if "poor_signal" in idx:
            poor.append(_parse_int(row[idx["poor_signal"]], "poor_signal", 0, 200, line))
    return AttentionSession(
        participant_id,
        seconds=secs,
        attention=att,
        meditation=med if "meditation" in idx else None,
        poor_signal=poor if "poor_signal" in idx else None,
    )


def _fmt_seconds(s: float) -> str:
    text = f"{s:.3f}".rstrip("0").rstrip(".")
    return text or "0"


def export_csv(session: AttentionSession) -> str:
    """Serialise a session; optional columns that are absent are omitted."""
    cols = ["t", "seconds", "attention"]
    extra = [c for c in ("meditation", "poor_signal") if getattr(session, c) is not None]
    cols += extra
    att = [_fmt_value(a) for a in session.attention.tolist()]
    secs = [_fmt_seconds(s) for s in session.seconds.tolist()]
    extra_cols = [getattr(session, c).astype(np.int64).tolist() for c in extra]
    lines = [",".join(cols)]
    for i, (s, a) in enumerate(zip(secs, att)):
        parts = [str(i + 1), s, a]
        parts += [str(col[i]) for col in extra_cols]
        lines.append(",".join(parts))
    return "\n".join(lines) + "\n"


def from_packets(packets: Sequence[DataPacket], participant_id: str = "") -> AttentionSession:
    """One sample per attention-bearing packet, values carried over unchanged."""
    rows = [p for p in packets if p.attention is not None]
    if not rows:
        raise SessionError("empty session: no attention-bearing packets")
    med = [p.meditation for p in rows]
    poor = [p.poor_signal for p in rows]
    return AttentionSession(
        participant_id,
        seconds=[p.timestamp_offset for p in rows],
        attention=[p.attention for p in rows],
        # a column is kept only when every sample carries it
        meditation=med if all(v is not None for v in med) else None,
        poor_signal=poor if all(v is not None for v in poor) else None,
    )
