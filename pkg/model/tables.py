"""Conversions between validated raw tables and domain values."""

from collections.abc import Iterable
from collections.abc import Mapping
import datetime

import pandas as pd

from .types import Demographics
from .types import Gender
from .types import Phq8Record
from .types import ScanRecord

COVARIATE_COLUMNS = ('age', 'female', 'education_years')
"""Regression covariates derived from the demographics table."""


def scans_frame(raw: pd.DataFrame | Iterable[ScanRecord]) -> pd.DataFrame:
    """Convert scans into a typed frame.

    Args:
        raw (DataFrame | Iterable[ScanRecord]): Validated raw scans table
            or scan records.

    Returns:
        DataFrame: Columns `participant_id` (str), `timestamp`
            (UTC datetime) and `device_count` (float).
    """
    if not isinstance(raw, pd.DataFrame):
        records = list(raw)
        raw = pd.DataFrame({
            'participant_id': [r.participant_id for r in records],
            'timestamp': [r.timestamp.isoformat() for r in records],
            'device_count': [r.device_count for r in records],
        })
    return pd.DataFrame({
        'participant_id': raw['participant_id'].astype(str),
        'timestamp': pd.to_datetime(
            raw['timestamp'],
            utc=True,
            format='ISO8601',
            errors='coerce',
        ),
        'device_count': pd.to_numeric(raw['device_count'], errors='coerce')
        .astype(float),
    })


def phq8_records(raw: pd.DataFrame) -> list[Phq8Record]:
    """Convert a validated PHQ-8 table into records.

    Args:
        raw (DataFrame): Validated raw PHQ-8 table.

    Returns:
        list[Phq8Record]: Records in table order.
    """
    dates = pd.to_datetime(raw['date'], format='%Y-%m-%d')
    scores = pd.to_numeric(raw['score'])
    return [
        Phq8Record(
            participant_id=str(pid),
            completion_date=date.date(),
            score=int(score),
        )
        for pid, date, score in zip(raw['participant_id'], dates, scores)
    ]


def demographics_records(raw: pd.DataFrame) -> dict[str, Demographics]:
    """Convert a validated demographics table into records.

    Args:
        raw (DataFrame): Validated raw demographics table.

    Returns:
        dict[str, Demographics]: Records by participant id.
    """
    ages = pd.to_numeric(raw['age'])
    education = pd.to_numeric(raw['education_years'])
    return {
        str(pid): Demographics(
            participant_id=str(pid),
            age_years=float(age),
            gender=Gender.parse(str(gender)),
            education_years=float(years),
        )
        for pid, age, gender, years in zip(
            raw['participant_id'],
            ages,
            raw['gender'],
            education,
        )
    }


def covariates_frame(demographics: Mapping[str, Demographics]) -> pd.DataFrame:
    """Build the regression covariates of every participant.

    Args:
        demographics (Mapping[str, Demographics]): Records by id.

    Returns:
        DataFrame: Indexed by `participant_id` with `COVARIATE_COLUMNS`.
    """
    frame = pd.DataFrame(
        [
            (d.participant_id, d.age_years, d.female, d.education_years)
            for d in demographics.values()
        ],
        columns=['participant_id', *COVARIATE_COLUMNS],
    )
    return frame.set_index('participant_id')


def phq8_frame(records: Iterable[Phq8Record]) -> pd.DataFrame:
    """Build a PHQ-8 table from records.

    Args:
        records (Iterable[Phq8Record]): PHQ-8 records.

    Returns:
        DataFrame: Raw-schema table with ISO dates.
    """
    return pd.DataFrame(
        [
            (r.participant_id, r.completion_date.isoformat(), r.score)
            for r in records
        ],
        columns=['participant_id', 'date', 'score'],
    )


def parse_date(text: str) -> datetime.date:
    """Parse a `YYYY-MM-DD` date.

    Args:
        text (str): Date text.

    Returns:
        date: Parsed date.
    """
    return datetime.date.fromisoformat(text)
