"""This module defines core types shared by all parts of the pipeline."""

import dataclasses
import datetime
import enum
import functools
import math
from typing import Final

import numpy as np

HOURS_PER_DAY: Final = 24
"""Number of hourly slots in one calendar day."""

MIN_VALID_HOURS: Final = 12
"""Observed hours required for a day to be valid."""

WINDOW_DAYS: Final = 14
"""Length of the window preceding a PHQ-8 completion."""

MIN_VALID_DAYS: Final = 10
"""Valid days required for a PHQ-8 record to become an interval."""

PHQ8_MIN: Final = 0
PHQ8_MAX: Final = 24

SEVERITY_THRESHOLDS: Final = (5, 10, 15, 20)
"""Lower bounds of every severity band except the first one."""


class ProxipheneError(Exception):
    """Base type for all exceptions raised by the pipeline."""


class InvalidRecordError(ProxipheneError, ValueError):
    """A domain value violates its invariants."""


@enum.unique
class Gender(enum.StrEnum):
    """Gender as recorded in the demographics table."""
    FEMALE = enum.auto()
    MALE = enum.auto()
    OTHER = enum.auto()

    @classmethod
    def parse(cls, text: str) -> 'Gender':
        """Convert a raw table value into a gender.

        Anything other than a recognized female/male spelling maps
        to `OTHER`.

        Args:
            text (str): Raw value.

        Returns:
            Gender: Parsed gender.
        """
        value = text.strip().lower()
        if value in ('female', 'f', 'woman'):
            return cls.FEMALE
        if value in ('male', 'm', 'man'):
            return cls.MALE
        return cls.OTHER


@enum.unique
class SeverityBand(enum.StrEnum):
    """Depressive symptom severity level derived from a PHQ-8 score."""
    ASYMPTOMATIC = enum.auto()
    MILD = enum.auto()
    MODERATE = enum.auto()
    MODERATELY_SEVERE = enum.auto()
    SEVERE = enum.auto()

    @classmethod
    def from_score(cls, score: int) -> 'SeverityBand':
        """Map a PHQ-8 score to its severity band.

        Args:
            score (int): PHQ-8 score in 0..24.

        Returns:
            SeverityBand: Band containing the score.

        Raises:
            InvalidRecordError: The score is out of range.
        """
        _check_score(score)
        members = list(cls)
        index = sum(score >= bound for bound in SEVERITY_THRESHOLDS)
        return members[index]


def severity_band(score: int) -> SeverityBand:
    """Map a PHQ-8 score to its severity band.

    Args:
        score (int): PHQ-8 score in 0..24.

    Returns:
        SeverityBand: Band containing the score.

    Raises:
        InvalidRecordError: The score is out of range.
    """
    return SeverityBand.from_score(score)


@dataclasses.dataclass(frozen=True)
class ScanRecord:
    """Device count of one hourly Bluetooth scan."""

    participant_id: str
    timestamp: datetime.datetime
    device_count: int

    def __post_init__(self) -> None:
        if self.device_count < 0:
            raise InvalidRecordError(
                f'Negative device count {self.device_count} '
                f'for {self.participant_id}',
            )
        if self.timestamp.tzinfo is None:
            raise InvalidRecordError(
                f'Timestamp without offset for {self.participant_id}',
            )


@dataclasses.dataclass(frozen=True)
class Phq8Record:
    """One completed PHQ-8 questionnaire."""

    participant_id: str
    completion_date: datetime.date
    score: int

    def __post_init__(self) -> None:
        _check_score(self.score)

    @property
    def severity(self) -> SeverityBand:
        """Returns the severity band of the score."""
        return SeverityBand.from_score(self.score)


@dataclasses.dataclass(frozen=True)
class Demographics:
    """Baseline covariates of one participant."""

    participant_id: str
    age_years: float
    gender: Gender
    education_years: float

    def __post_init__(self) -> None:
        if not self.age_years >= 0 or not self.education_years >= 0:
            raise InvalidRecordError(
                f'Negative or missing covariate for {self.participant_id}',
            )

    @property
    def female(self) -> float:
        """Returns the regression indicator of the female gender."""
        return 1.0 if self.gender == Gender.FEMALE else 0.0


@dataclasses.dataclass(frozen=True)
class DayGrid:
    """Hourly device counts of one participant over one calendar day.

    Missing slots are `None`. Slots filled by interpolation are listed
    in `imputed` so validity is always judged on observed data.
    """

    participant_id: str
    date: datetime.date
    hours: tuple[float | None, ...]
    imputed: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(self.hours) != HOURS_PER_DAY:
            raise InvalidRecordError(
                f'Day {self.date} of {self.participant_id} has '
                f'{len(self.hours)} slots instead of {HOURS_PER_DAY}',
            )
        for value in self.hours:
            if value is not None and not value >= 0:
                raise InvalidRecordError(
                    f'Bad slot value {value} on {self.date} '
                    f'of {self.participant_id}',
                )

    @property
    def n_observed(self) -> int:
        """Returns the number of observed (not imputed) hours."""
        filled = sum(value is not None for value in self.hours)
        return filled - len(self.imputed)

    @property
    def valid(self) -> bool:
        """Returns `True` if the day has enough observed hours."""
        return self.n_observed >= MIN_VALID_HOURS

    @property
    def populated(self) -> bool:
        """Returns `True` if no slot is missing."""
        return all(value is not None for value in self.hours)

    def values(self) -> np.ndarray:
        """Returns slot values as floats with NaN for missing slots."""
        return np.array(
            [math.nan if value is None else value for value in self.hours],
            dtype=float,
        )


@dataclasses.dataclass(frozen=True)
class NbdcInterval:
    """Gap-filled hourly sequence attached to one PHQ-8 record."""

    participant_id: str
    phq8: Phq8Record
    days: tuple[DayGrid, ...]

    def __post_init__(self) -> None:
        n_days = len(self.days)
        if not MIN_VALID_DAYS <= n_days <= WINDOW_DAYS:
            raise InvalidRecordError(
                f'Interval {self.key} has {n_days} valid days',
            )
        first_day = self.phq8.completion_date - datetime.timedelta(
            days=WINDOW_DAYS,
        )
        dates = [day.date for day in self.days]
        if dates != sorted(set(dates)):
            raise InvalidRecordError(f'Interval {self.key} days not ordered')
        for day in self.days:
            if not first_day <= day.date < self.phq8.completion_date:
                raise InvalidRecordError(
                    f'Day {day.date} is outside the window of {self.key}',
                )
            if not day.populated:
                raise InvalidRecordError(
                    f'Day {day.date} of {self.key} has missing slots',
                )

    @property
    def key(self) -> str:
        """Returns an identifier of the interval."""
        return f'{self.participant_id}@{self.phq8.completion_date}'

    @property
    def n_valid_days(self) -> int:
        """Returns the number of valid days in the interval."""
        return len(self.days)

    @functools.cached_property
    def sequence(self) -> np.ndarray:
        """Returns the concatenated hourly sequence."""
        return np.concatenate([day.values() for day in self.days])

    def daily_matrix(self) -> np.ndarray:
        """Returns hourly values as a `(n_valid_days, 24)` matrix."""
        return self.sequence.reshape(self.n_valid_days, HOURS_PER_DAY)


def _check_score(score: int) -> None:
    """Internal helper to validate a PHQ-8 score.

    Args:
        score (int): PHQ-8 score.

    Raises:
        InvalidRecordError: The score is out of range.
    """
    if isinstance(score, bool) or int(score) != score:
        raise InvalidRecordError(f'PHQ-8 score {score!r} is not an integer')
    if not PHQ8_MIN <= score <= PHQ8_MAX:
        raise InvalidRecordError(
            f'PHQ-8 score {score} is outside {PHQ8_MIN}..{PHQ8_MAX}',
        )
