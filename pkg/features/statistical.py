"""Second-order statistical features of an NBDC interval.

Each valid day is summarized by four daily statistics, then each daily
statistic is summarized across days by the same four statistics. The
feature `Mean_Max` is the mean over days of the daily maxima.
"""

from collections.abc import Sequence
import dataclasses
import enum

import numpy as np

from model.types import DayGrid
from model.types import NbdcInterval

from .errors import FeatureError


@enum.unique
class Statistic(enum.StrEnum):
    """Summary statistics used at both levels, in feature order."""
    MAX = 'Max'
    MIN = 'Min'
    MEAN = 'Mean'
    STD = 'Std'


STATISTICAL_FEATURES = tuple(
    f'{outer}_{inner}' for outer in Statistic for inner in Statistic
)
"""Names of the 16 features, second-order statistic first."""


@dataclasses.dataclass(frozen=True)
class DailyStats:
    """Summary of the 24 hourly values of one day."""

    max: float
    min: float
    mean: float
    std: float


def daily_stats(day: DayGrid | Sequence[float] | np.ndarray) -> DailyStats:
    """Summarize one populated day.

    Args:
        day (DayGrid | ArrayLike): Populated day or its hourly values.

    Returns:
        DailyStats: Max, min, mean and sample standard deviation.

    Raises:
        FeatureError: Some slot is missing.
    """
    values = day.values() if isinstance(day, DayGrid) else np.asarray(day, float)
    if values.size < 2 or np.isnan(values).any():
        raise FeatureError('Daily statistics need a populated day')
    return DailyStats(
        max=float(values.max()),
        min=float(values.min()),
        mean=float(values.mean()),
        std=float(values.std(ddof=1)),
    )


def second_order_features(
    interval: NbdcInterval | np.ndarray,
) -> dict[str, float]:
    """Compute the 16 second-order statistical features.

    Args:
        interval (NbdcInterval | ndarray): Interval or its
            `(n_days, 24)` matrix of hourly values.

    Returns:
        dict[str, float]: Features keyed `<second-order>_<daily>`.

    Raises:
        FeatureError: Fewer than two days or missing values.
    """
    matrix = (
        interval.daily_matrix()
        if isinstance(interval, NbdcInterval)
        else np.asarray(interval, float)
    )
    if matrix.ndim != 2 or matrix.shape[0] < 2 or np.isnan(matrix).any():
        raise FeatureError(
            'Second-order features need at least two populated days',
        )
    daily = {
        Statistic.MAX: matrix.max(axis=1),
        Statistic.MIN: matrix.min(axis=1),
        Statistic.MEAN: matrix.mean(axis=1),
        Statistic.STD: matrix.std(axis=1, ddof=1),
    }
    features = {}
    for outer in Statistic:
        for inner in Statistic:
            features[f'{outer}_{inner}'] = _summarize(daily[inner], outer)
    return features


def _summarize(values: np.ndarray, statistic: Statistic) -> float:
    """Internal helper to apply one summary statistic."""
    match statistic:
        case Statistic.MAX:
            return float(values.max())
        case Statistic.MIN:
            return float(values.min())
        case Statistic.MEAN:
            return float(values.mean())
        case Statistic.STD:
            return float(values.std(ddof=1))
