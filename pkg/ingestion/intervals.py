"""This module assembles PHQ-8 intervals from binned days."""

from collections import Counter
from collections.abc import Iterable
import dataclasses
import datetime
import enum

import pandas as pd

import log
from model.types import DayGrid
from model.types import MIN_VALID_DAYS
from model.types import NbdcInterval
from model.types import Phq8Record
from model.types import WINDOW_DAYS

from .days import interpolate_day


@enum.unique
class RejectionReason(enum.StrEnum):
    """Why a PHQ-8 record did not become an interval."""
    AFTER_CUTOFF = enum.auto()
    INSUFFICIENT_VALID_DAYS = enum.auto()
    DUPLICATE_RECORD = enum.auto()


@dataclasses.dataclass(frozen=True)
class Rejection:
    """One PHQ-8 record excluded from analysis."""

    participant_id: str
    date: datetime.date
    reason: RejectionReason
    n_valid_days: int | None = None


@dataclasses.dataclass(frozen=True)
class RetentionStats:
    """Share of data kept by the inclusion rules."""

    n_days: int
    n_valid_days: int
    n_records: int
    n_intervals: int
    rejections: dict[str, int]

    @property
    def valid_day_share(self) -> float:
        """Returns the share of observed days that are valid."""
        return self.n_valid_days / self.n_days if self.n_days else 0.0

    @property
    def interval_share(self) -> float:
        """Returns the share of PHQ-8 records kept as intervals."""
        return self.n_intervals / self.n_records if self.n_records else 0.0

    def to_dict(self) -> dict[str, object]:
        """Returns the statistics as a JSON-compatible dictionary."""
        return {
            'n_days': self.n_days,
            'n_valid_days': self.n_valid_days,
            'valid_day_share': self.valid_day_share,
            'n_records': self.n_records,
            'n_intervals': self.n_intervals,
            'interval_share': self.interval_share,
            'rejections': dict(sorted(self.rejections.items())),
        }


@dataclasses.dataclass(frozen=True)
class AssemblyResult:
    """Intervals built from a dataset together with the rejection log."""

    intervals: list[NbdcInterval]
    rejections: list[Rejection]
    stats: RetentionStats

    def rejections_frame(self) -> pd.DataFrame:
        """Returns the rejection log as a `participant_id,date,reason` table."""
        return pd.DataFrame(
            [
                (r.participant_id, r.date.isoformat(), str(r.reason))
                for r in self.rejections
            ],
            columns=['participant_id', 'date', 'reason'],
        )


def assemble_intervals(
    days: Iterable[DayGrid],
    phq8s: Iterable[Phq8Record],
    cutoff_date: datetime.date | None = None,
) -> AssemblyResult:
    """Attach the valid days preceding each PHQ-8 record to it.

    The window of a record is the 14 calendar days strictly before its
    completion date. A record becomes an interval if it is dated before
    `cutoff_date` and its window holds at least 10 valid days; those
    days are interpolated, invalid days are discarded. Of several
    records sharing participant and date only the first is considered.

    Args:
        days (Iterable[DayGrid]): Binned days.
        phq8s (Iterable[Phq8Record]): PHQ-8 records.
        cutoff_date (Optional[date]): Exclusive upper bound of record
            dates, no bound if omitted.

    Returns:
        AssemblyResult: Intervals ordered by participant and date, and
            rejected records in input order.
    """
    logger = log.create_logger(assemble_intervals)
    days = list(days)
    valid_days: dict[str, dict[datetime.date, DayGrid]] = {}
    for day in days:
        if day.valid:
            valid_days.setdefault(day.participant_id, {})[day.date] = day

    intervals = []
    rejections = []
    seen = set()
    n_records = 0
    for record in phq8s:
        n_records += 1
        key = (record.participant_id, record.completion_date)
        if key in seen:
            rejections.append(
                _reject(record, RejectionReason.DUPLICATE_RECORD),
            )
            continue
        seen.add(key)
        if cutoff_date is not None and record.completion_date >= cutoff_date:
            rejections.append(_reject(record, RejectionReason.AFTER_CUTOFF))
            continue

        participant_days = valid_days.get(record.participant_id, {})
        window = [
            participant_days[date]
            for date in _window_dates(record.completion_date)
            if date in participant_days
        ]
        if len(window) < MIN_VALID_DAYS:
            rejections.append(
                _reject(
                    record,
                    RejectionReason.INSUFFICIENT_VALID_DAYS,
                    len(window),
                ),
            )
            continue
        intervals.append(
            NbdcInterval(
                participant_id=record.participant_id,
                phq8=record,
                days=tuple(interpolate_day(day) for day in window),
            ),
        )

    intervals.sort(
        key=lambda i: (i.participant_id, i.phq8.completion_date),
    )
    stats = RetentionStats(
        n_days=len(days),
        n_valid_days=sum(day.valid for day in days),
        n_records=n_records,
        n_intervals=len(intervals),
        rejections=dict(Counter(str(r.reason) for r in rejections)),
    )
    for rejection in rejections:
        logger.debug(
            'Rejected %s@%s: %s',
            rejection.participant_id,
            rejection.date,
            rejection.reason,
        )
    logger.info(
        'Assembled %d intervals from %d PHQ-8 records '
        '(%.2f%% of records, %.2f%% of days valid), rejections: %s',
        stats.n_intervals,
        stats.n_records,
        100 * stats.interval_share,
        100 * stats.valid_day_share,
        stats.rejections or 'none',
    )
    return AssemblyResult(intervals, rejections, stats)


def _window_dates(completion_date: datetime.date) -> list[datetime.date]:
    """Internal helper to list the window days of a completion date."""
    return [
        completion_date - datetime.timedelta(days=offset)
        for offset in range(WINDOW_DAYS, 0, -1)
    ]


def _reject(
    record: Phq8Record,
    reason: RejectionReason,
    n_valid_days: int | None = None,
) -> Rejection:
    """Internal helper to create a rejection of a record."""
    return Rejection(
        participant_id=record.participant_id,
        date=record.completion_date,
        reason=reason,
        n_valid_days=n_valid_days,
    )
