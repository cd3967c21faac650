"""This module validates raw input tables before they enter the pipeline.

Tables are validated as read from CSV, every cell still a string, so
the report can point at the exact data row that breaks a rule. Row
numbers are 1-based data-row indices (the header is not counted).
"""

import dataclasses
import enum
from typing import Final

import pandas as pd

import log

from .types import PHQ8_MAX
from .types import PHQ8_MIN
from .types import ProxipheneError

SCAN_COLUMNS: Final = ('participant_id', 'timestamp', 'device_count')
PHQ8_COLUMNS: Final = ('participant_id', 'date', 'score')
DEMOGRAPHICS_COLUMNS: Final = (
    'participant_id',
    'age',
    'gender',
    'education_years',
)

UTC_OFFSET_PATTERN: Final = (
    r'\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?\s*(?:Z|[+-]\d{2}(?::?\d{2})?)$'
)
"""Time of day followed by `Z` or `±HH[:MM]` in an ISO 8601 timestamp."""

MAX_ROWS_PER_ISSUE: Final = 20
"""Row numbers listed in one issue message before truncation."""


@enum.unique
class Table(enum.StrEnum):
    """Input tables of the pipeline."""
    SCANS = enum.auto()
    PHQ8 = enum.auto()
    DEMOGRAPHICS = enum.auto()


@enum.unique
class Severity(enum.StrEnum):
    """How a validation issue affects the dataset."""
    FATAL = enum.auto()
    WARNING = enum.auto()


@dataclasses.dataclass(frozen=True)
class ValidationIssue:
    """One broken rule, possibly spanning many rows."""

    table: Table
    severity: Severity
    rule: str
    rows: tuple[int, ...] = ()
    detail: str = ''

    def __str__(self) -> str:
        """Returns a human-readable description of the issue."""
        text = f'{self.table}: {self.rule}'
        if self.detail:
            text = f'{text} ({self.detail})'
        if self.rows:
            shown = ', '.join(map(str, self.rows[:MAX_ROWS_PER_ISSUE]))
            if len(self.rows) > MAX_ROWS_PER_ISSUE:
                shown = f'{shown}, ... ({len(self.rows)} rows)'
            text = f'{text} at rows {shown}'
        return text


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    """Outcome of dataset validation."""

    issues: tuple[ValidationIssue, ...] = ()

    @property
    def fatal(self) -> tuple[ValidationIssue, ...]:
        """Returns issues that reject the dataset."""
        return tuple(i for i in self.issues if i.severity == Severity.FATAL)

    @property
    def warnings(self) -> tuple[ValidationIssue, ...]:
        """Returns issues that are reported but tolerated."""
        return tuple(
            i for i in self.issues if i.severity == Severity.WARNING
        )

    @property
    def accepted(self) -> bool:
        """Returns `True` if there are no fatal issues."""
        return not self.fatal


class DatasetError(ProxipheneError):
    """Input tables break fatal validation rules."""

    def __init__(self, report: ValidationReport) -> None:
        """Initialize an exception object.

        Args:
            report (ValidationReport): Report with fatal issues.
        """
        issues = '; '.join(map(str, report.fatal))
        super().__init__(f'Dataset rejected: {issues}')
        self.report = report


class _Collector:
    """Accumulates issues while the tables are checked."""

    def __init__(self) -> None:
        self.issues: list[ValidationIssue] = []

    def add(
        self,
        table: Table,
        severity: Severity,
        rule: str,
        mask: pd.Series | None = None,
        detail: str = '',
    ) -> None:
        rows: tuple[int, ...] = ()
        if mask is not None:
            if not mask.any():
                return
            rows = tuple(int(i) + 1 for i in mask.to_numpy().nonzero()[0])
        self.issues.append(
            ValidationIssue(table, severity, rule, rows, detail),
        )


def validate_dataset(
    scans: pd.DataFrame,
    phq8s: pd.DataFrame,
    demographics: pd.DataFrame | None = None,
) -> ValidationReport:
    """Check raw input tables against the schema rules.

    Fatal: missing headers, missing ids, unparseable timestamps, dates
    and numbers, timestamps without a UTC offset, negative device counts,
    PHQ-8 scores outside 0..24, duplicate demographics rows. Warnings:
    participants with scans or PHQ-8 records but no demographics (their
    data is retained).

    Args:
        scans (DataFrame): Raw scans table.
        phq8s (DataFrame): Raw PHQ-8 table.
        demographics (Optional[DataFrame]): Raw demographics table.
            Demographic rules are skipped if omitted.

    Returns:
        ValidationReport: All issues found.
    """
    logger = log.create_logger(validate_dataset)
    collector = _Collector()
    tables = [
        (Table.SCANS, scans, SCAN_COLUMNS),
        (Table.PHQ8, phq8s, PHQ8_COLUMNS),
    ]
    if demographics is not None:
        tables.append((Table.DEMOGRAPHICS, demographics, DEMOGRAPHICS_COLUMNS))
    headers_ok = True
    for table, frame, columns in tables:
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            headers_ok = False
            collector.add(
                table,
                Severity.FATAL,
                'missing columns',
                detail=', '.join(missing),
            )
    if headers_ok:
        _check_scans(collector, scans)
        _check_phq8(collector, phq8s)
        if demographics is not None:
            _check_demographics(collector, demographics)
            _check_orphans(collector, scans, phq8s, demographics)

    report = ValidationReport(tuple(collector.issues))
    for issue in report.fatal:
        logger.error('Validation: %s', issue)
    for issue in report.warnings:
        logger.warning('Validation: %s', issue)
    logger.info(
        'Validated %d scans, %d PHQ-8 records, %d demographics rows: %s',
        len(scans),
        len(phq8s),
        0 if demographics is None else len(demographics),
        'accepted' if report.accepted else 'rejected',
    )
    return report


def validate_demographics(demographics: pd.DataFrame) -> ValidationReport:
    """Check a raw demographics table on its own.

    Args:
        demographics (DataFrame): Raw demographics table.

    Returns:
        ValidationReport: All issues found.
    """
    logger = log.create_logger(validate_demographics)
    collector = _Collector()
    missing = [c for c in DEMOGRAPHICS_COLUMNS if c not in demographics.columns]
    if missing:
        collector.add(
            Table.DEMOGRAPHICS,
            Severity.FATAL,
            'missing columns',
            detail=', '.join(missing),
        )
    else:
        _check_demographics(collector, demographics)
    report = ValidationReport(tuple(collector.issues))
    for issue in report.fatal:
        logger.error('Validation: %s', issue)
    return report


def _check_ids(collector: _Collector, table: Table, ids: pd.Series) -> None:
    """Internal helper to flag empty participant ids."""
    empty = ids.isna() | (ids.astype(str).str.strip() == '')
    collector.add(table, Severity.FATAL, 'empty participant_id', empty)


def _check_scans(collector: _Collector, scans: pd.DataFrame) -> None:
    """Internal helper to validate the scans table."""
    _check_ids(collector, Table.SCANS, scans['participant_id'])
    stamps = pd.to_datetime(
        scans['timestamp'],
        utc=True,
        format='ISO8601',
        errors='coerce',
    )
    collector.add(
        Table.SCANS,
        Severity.FATAL,
        'unparseable timestamp',
        stamps.isna(),
    )
    # Naive timestamps are rejected, not read as UTC
    offset = scans['timestamp'].astype(str).str.strip().str.contains(
        UTC_OFFSET_PATTERN,
        regex=True,
    )
    collector.add(
        Table.SCANS,
        Severity.FATAL,
        'timestamp has no UTC offset',
        stamps.notna() & ~offset,
    )
    counts = pd.to_numeric(scans['device_count'], errors='coerce')
    collector.add(
        Table.SCANS,
        Severity.FATAL,
        'device_count is not an integer',
        counts.isna() | (counts != counts.round()),
    )
    collector.add(
        Table.SCANS,
        Severity.FATAL,
        'negative device_count',
        counts < 0,
    )


def _check_phq8(collector: _Collector, phq8s: pd.DataFrame) -> None:
    """Internal helper to validate the PHQ-8 table."""
    _check_ids(collector, Table.PHQ8, phq8s['participant_id'])
    dates = pd.to_datetime(phq8s['date'], format='%Y-%m-%d', errors='coerce')
    collector.add(Table.PHQ8, Severity.FATAL, 'unparseable date', dates.isna())
    scores = pd.to_numeric(phq8s['score'], errors='coerce')
    collector.add(
        Table.PHQ8,
        Severity.FATAL,
        'score is not an integer',
        scores.isna() | (scores != scores.round()),
    )
    collector.add(
        Table.PHQ8,
        Severity.FATAL,
        f'score outside {PHQ8_MIN}..{PHQ8_MAX}',
        (scores < PHQ8_MIN) | (scores > PHQ8_MAX),
    )


def _check_demographics(
    collector: _Collector,
    demographics: pd.DataFrame,
) -> None:
    """Internal helper to validate the demographics table."""
    _check_ids(collector, Table.DEMOGRAPHICS, demographics['participant_id'])
    for column in ('age', 'education_years'):
        values = pd.to_numeric(demographics[column], errors='coerce')
        collector.add(
            Table.DEMOGRAPHICS,
            Severity.FATAL,
            f'{column} is not a non-negative number',
            values.isna() | (values < 0),
        )
    duplicated = demographics['participant_id'].duplicated(keep=False)
    collector.add(
        Table.DEMOGRAPHICS,
        Severity.FATAL,
        'duplicate participant_id',
        duplicated,
    )


def _check_orphans(
    collector: _Collector,
    scans: pd.DataFrame,
    phq8s: pd.DataFrame,
    demographics: pd.DataFrame,
) -> None:
    """Internal helper to report participants missing demographics."""
    known = set(demographics['participant_id'])
    for table, frame in ((Table.SCANS, scans), (Table.PHQ8, phq8s)):
        orphans = sorted(set(frame['participant_id']) - known, key=str)
        if orphans:
            collector.add(
                table,
                Severity.WARNING,
                'participants without demographics',
                detail=', '.join(map(str, orphans)),
            )
