"""Prediction cohort and time-series cross-validation splits.

Intervals of a participant are numbered 1..t by PHQ-8 date. LAO
iteration `k` tests every participant's k-th interval after training on
all intervals numbered below `k`. LOO holds out one participant at a
time, training on that participant's first two intervals and on every
interval of everybody else.
"""

from collections.abc import Iterable
import dataclasses

import pandas as pd

from model.types import NbdcInterval
from prediction.metrics import Scheme

from .errors import EvaluationError

MIN_INTERVALS = 3
MIN_SCORE_RANGE = 5
LOO_TRAINING_INTERVALS = 2

POSITION = 'position'
KEY = 'key'


@dataclasses.dataclass(frozen=True)
class CvSplit:
    """Training and test intervals of one cross-validation step."""

    scheme: Scheme
    iteration: int
    train: tuple[str, ...]
    test: tuple[str, ...]

    def to_dict(self) -> dict[str, object]:
        """Returns the split as a JSON-compatible dictionary."""
        return {
            'scheme': str(self.scheme),
            'iteration': self.iteration,
            'train': list(self.train),
            'test': list(self.test),
        }


def interval_key(participant_id: str, date: str) -> str:
    """Returns the identifier of an interval.

    Args:
        participant_id (str): Participant.
        date (str): ISO date of the PHQ-8 record.
    """
    return f'{participant_id}@{date}'


def interval_table(
    intervals: Iterable[NbdcInterval] | pd.DataFrame,
) -> pd.DataFrame:
    """Build an ordered table of intervals with per-participant positions.

    Args:
        intervals (Iterable[NbdcInterval] | DataFrame): Intervals, or a
            table with `participant_id`, `date` and `phq8` columns.

    Returns:
        DataFrame: Input rows sorted by participant and date with `key`
            and 1-based `position` columns.
    """
    if isinstance(intervals, pd.DataFrame):
        frame = intervals.copy()
    else:
        frame = pd.DataFrame(
            [
                (i.participant_id, i.phq8.completion_date.isoformat(), i.phq8.score)
                for i in intervals
            ],
            columns=['participant_id', 'date', 'phq8'],
        )
    frame['participant_id'] = frame['participant_id'].astype(str)
    frame['date'] = frame['date'].astype(str)
    frame = frame.sort_values(['participant_id', 'date'], kind='stable')
    frame = frame.reset_index(drop=True)
    frame[KEY] = [
        interval_key(p, d) for p, d in zip(frame['participant_id'], frame['date'])
    ]
    if frame[KEY].duplicated().any():
        raise EvaluationError('Several intervals share participant and date')
    frame[POSITION] = frame.groupby('participant_id').cumcount() + 1
    return frame


def select_prediction_cohort(
    intervals: Iterable[NbdcInterval] | pd.DataFrame,
    min_intervals: int = MIN_INTERVALS,
    min_score_range: int = MIN_SCORE_RANGE,
) -> list[str]:
    """Select participants eligible for prediction.

    A participant needs at least 3 intervals and a PHQ-8 range of at
    least 5 points.

    Args:
        intervals (Iterable[NbdcInterval] | DataFrame): Intervals.
        min_intervals (int): Smallest interval count.
        min_score_range (int): Smallest score range.

    Returns:
        list[str]: Sorted participant ids.
    """
    frame = interval_table(intervals)
    scores = frame.groupby('participant_id')['phq8'].agg(['count', 'min', 'max'])
    eligible = scores[
        (scores['count'] >= min_intervals)
        & (scores['max'] - scores['min'] >= min_score_range)
    ]
    return sorted(eligible.index)


def lao_splits(cohort: pd.DataFrame) -> list[CvSplit]:
    """Create leave-all-out splits.

    Args:
        cohort (DataFrame): Interval table of the prediction cohort.

    Returns:
        list[CvSplit]: One split per iteration `k = 2..T`.
    """
    frame = interval_table(cohort)
    if frame.empty:
        return []
    splits = []
    for k in range(2, int(frame[POSITION].max()) + 1):
        splits.append(
            CvSplit(
                scheme=Scheme.LAO,
                iteration=k,
                train=tuple(frame.loc[frame[POSITION] < k, KEY]),
                test=tuple(frame.loc[frame[POSITION] == k, KEY]),
            ),
        )
    return splits


def loo_splits(cohort: pd.DataFrame) -> list[CvSplit]:
    """Create leave-one-out splits.

    Args:
        cohort (DataFrame): Interval table of the prediction cohort.

    Returns:
        list[CvSplit]: One split per participant with a test interval.
    """
    frame = interval_table(cohort)
    splits = []
    for iteration, participant in enumerate(
        frame['participant_id'].unique(),
        start=1,
    ):
        own = frame['participant_id'] == participant
        held_out = own & (frame[POSITION] > LOO_TRAINING_INTERVALS)
        if not held_out.any():
            continue
        splits.append(
            CvSplit(
                scheme=Scheme.LOO,
                iteration=iteration,
                train=tuple(frame.loc[~held_out, KEY]),
                test=tuple(frame.loc[held_out, KEY]),
            ),
        )
    return splits


def make_splits(cohort: pd.DataFrame, scheme: Scheme) -> list[CvSplit]:
    """Create splits of a scheme.

    Args:
        cohort (DataFrame): Interval table of the prediction cohort.
        scheme (Scheme): Scheme to use.

    Returns:
        list[CvSplit]: Splits.
    """
    match Scheme(scheme):
        case Scheme.LAO:
            return lao_splits(cohort)
        case Scheme.LOO:
            return loo_splits(cohort)


def check_no_leakage(split: CvSplit, cohort: pd.DataFrame) -> None:
    """Verify that training precedes testing within every participant.

    Args:
        split (CvSplit): Split to audit.
        cohort (DataFrame): Interval table the split was made from.

    Raises:
        EvaluationError: Overlapping rows or a training interval dated
            after a test interval of the same participant.
    """
    frame = interval_table(cohort).set_index(KEY)
    overlap = set(split.train) & set(split.test)
    if overlap:
        raise EvaluationError(
            f'{split.scheme} split {split.iteration} reuses {sorted(overlap)}',
        )
    train = frame.loc[list(split.train)]
    test = frame.loc[list(split.test)]
    last_train = train.groupby('participant_id')[POSITION].max()
    first_test = test.groupby('participant_id')[POSITION].min()
    for participant, position in first_test.items():
        if last_train.get(participant, 0) >= position:
            raise EvaluationError(
                f'{split.scheme} split {split.iteration} trains on future '
                f'intervals of {participant}',
            )
