"""EFGA attention-frequency scale: Mo / MAPE per participant, grouping and validation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal
from typing import Sequence

import numpy as np

from .session import EsenseBand, classify_band
from .stats import pearson, standardized_alpha

DEFAULT_THRESHOLD = 1.0


class EfgaError(ValueError):
    pass


class Group(enum.Enum):
    NORMAL_SUPERIOR = "NormalSuperior"
    LOW = "Low"


def efga_score(mo: float, mape: float, x100: bool = False) -> float:
    """Mode over MAPE. ``x100`` multiplies by 100 (alternative scaling)."""
    if not mape > 0:
        raise EfgaError(f"MAPE must be positive, got {mape}")
    if not 0 <= mo <= 100:
        raise EfgaError(f"Mo must lie in [0, 100], got {mo}")
    v = mo / mape
    return v * 100.0 if x100 else v


def format_efga(value: float, digits: int = 2, mode: str = "truncate") -> str:
    """Fixed-point rendering of an EFGA value.

    ``truncate`` drops extra digits (the convention of the reference
    tables); ``round`` rounds half-up.
    """
    q = Decimal(1).scaleb(-digits)
    if mode == "truncate":
        # nudge past binary representation error before dropping digits
        d = Decimal(repr(value + math.copysign(1e-9, value)))
        return str(d.quantize(q, rounding=ROUND_DOWN))
    if mode == "round":
        return str(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class EfgaRecord:
    participant_id: str
    mo: float
    mape: float
    efga: float
    band: EsenseBand
    group: Group

    @property
    def ratio(self) -> float:
        return self.mo / self.mape


def make_record(
    participant_id: str,
    mo: float,
    mape: float,
    threshold: float = DEFAULT_THRESHOLD,
    x100: bool = False,
) -> EfgaRecord:
    """Build a record; the group cut is applied to Mo/MAPE regardless of ``x100``."""
    if not threshold > 0:
        raise EfgaError("threshold must be positive")
    efga = efga_score(mo, mape, x100)
    group = Group.NORMAL_SUPERIOR if mo / mape >= threshold else Group.LOW
    return EfgaRecord(participant_id, float(mo), float(mape), efga, classify_band(mo), group)


def split_groups(records: Sequence[EfgaRecord]) -> tuple[list[EfgaRecord], list[EfgaRecord]]:
    """(retained, declined), each ordered by ascending MAPE."""
    ids = [r.participant_id for r in records]
    if len(set(ids)) != len(ids):
        raise EfgaError("duplicate participant ids")
    key = lambda r: (r.mape, r.participant_id)  # noqa: E731
    retained = sorted((r for r in records if r.group is Group.NORMAL_SUPERIOR), key=key)
    declined = sorted((r for r in records if r.group is Group.LOW), key=key)
    return retained, declined


def retention_rate(records: Sequence[EfgaRecord]) -> float:
    """Percentage of records in the retained group, to one decimal."""
    if not records:
        raise EfgaError("retention rate of an empty cohort")
    kept = sum(r.group is Group.NORMAL_SUPERIOR for r in records)
    pct = Decimal(100 * kept) / Decimal(len(records))
    return float(pct.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


ITEM_COLUMNS = ("Mo", "MAPE", "EFGA")


@dataclass(frozen=True)
class ValidationReport:
    pearson_r: float
    cronbach_alpha: float
    item_names: tuple[str, str]


def _column(records: Sequence[EfgaRecord], name: str) -> np.ndarray:
    attr = {"Mo": "mo", "MAPE": "mape", "EFGA": "efga"}[name]
    return np.array([getattr(r, attr) for r in records], dtype=np.float64)


def validate_scale(
    records: Sequence[EfgaRecord], item_pair: tuple[str, str] = ("Mo", "EFGA")
) -> ValidationReport:
    """Pearson r between two record columns and the standardized two-item alpha."""
    for name in item_pair:
        if name not in ITEM_COLUMNS:
            raise EfgaError(f"unknown item {name!r}; choose from {ITEM_COLUMNS}")
    if len(records) < 3:
        raise EfgaError("scale validation needs at least 3 records")
    x, y = (_column(records, n) for n in item_pair)
    r = pearson(x, y)
    return ValidationReport(r, standardized_alpha(r, 2), tuple(item_pair))
