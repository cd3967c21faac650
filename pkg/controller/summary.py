"""Cohort summary in the layout of a demographics table."""

from collections.abc import Mapping
from collections.abc import Sequence
import dataclasses

import numpy as np
import pandas as pd

from model.types import Demographics
from model.types import SeverityBand


@dataclasses.dataclass(frozen=True)
class Quartiles:
    """Median with the first and third quartiles."""

    median: float
    q1: float
    q3: float

    @classmethod
    def of(cls, values: Sequence[float] | np.ndarray) -> 'Quartiles':
        """Returns quartiles of values, NaN if there are none.

        Args:
            values (ArrayLike): Values to summarize.
        """
        values = np.asarray(values, dtype=float)
        if not values.size:
            return cls(np.nan, np.nan, np.nan)
        q1, median, q3 = np.percentile(values, [25, 50, 75])
        return cls(float(median), float(q1), float(q3))


@dataclasses.dataclass(frozen=True)
class CohortSummary:
    """Baseline characteristics of the participants with intervals."""

    n_participants: int
    age: Quartiles
    n_female: int
    education_years: Quartiles
    n_intervals: int
    intervals_per_participant: Quartiles
    phq8: Quartiles
    severity_counts: dict[str, int]

    @property
    def female_share(self) -> float:
        """Returns the share of female participants."""
        if not self.n_participants:
            return np.nan
        return self.n_female / self.n_participants

    def to_dict(self) -> dict[str, object]:
        """Returns the summary as a JSON-compatible dictionary."""
        return dataclasses.asdict(self) | {'female_share': self.female_share}


def summarize_cohort(
    intervals: pd.DataFrame,
    demographics: Mapping[str, Demographics],
) -> CohortSummary:
    """Summarize participants that have both intervals and demographics.

    Args:
        intervals (DataFrame): Table with `participant_id` and `phq8`
            columns, one row per interval.
        demographics (Mapping[str, Demographics]): Records by id.

    Returns:
        CohortSummary: Cohort characteristics.
    """
    ids = intervals['participant_id'].astype(str)
    intervals = intervals[ids.isin(list(demographics)).to_numpy()]
    participants = sorted(set(intervals['participant_id'].astype(str)))
    people = [demographics[p] for p in participants]
    scores = intervals['phq8'].astype(int)
    bands = [str(SeverityBand.from_score(int(score))) for score in scores]
    return CohortSummary(
        n_participants=len(participants),
        age=Quartiles.of([p.age_years for p in people]),
        n_female=int(sum(p.female for p in people)),
        education_years=Quartiles.of([p.education_years for p in people]),
        n_intervals=len(intervals),
        intervals_per_participant=Quartiles.of(
            intervals.groupby('participant_id').size().to_numpy(),
        ),
        phq8=Quartiles.of(scores.to_numpy()),
        severity_counts={
            str(band): bands.count(str(band)) for band in SeverityBand
        },
    )
