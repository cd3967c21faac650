"""This module extracts the full feature vector of intervals."""

from collections.abc import Iterable
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
import dataclasses
import datetime
import math

import numpy as np
import pandas as pd

import log
from model.types import NbdcInterval

from .entropy import MseParams
from .entropy import mse_profile
from .frequency import BandDefinition
from .frequency import FREQUENCY_FEATURES
from .frequency import band_features
from .frequency import band_spectral_entropy
from .frequency import power_spectrum
from .statistical import STATISTICAL_FEATURES
from .statistical import second_order_features

MSE_FEATURES = MseParams().feature_names

FEATURE_NAMES = (*STATISTICAL_FEATURES, *MSE_FEATURES, *FREQUENCY_FEATURES)
"""All 49 feature names in table order."""

ID_COLUMNS = ('participant_id', 'date', 'phq8')
FLAGS_COLUMN = 'flags'


@dataclasses.dataclass(frozen=True)
class FeatureVector:
    """Features of one interval with the interval it belongs to."""

    participant_id: str
    date: datetime.date
    phq8: int
    values: dict[str, float]
    flags: tuple[str, ...] = ()

    @property
    def finite(self) -> bool:
        """Returns `True` if every feature is a finite number."""
        return all(math.isfinite(v) for v in self.values.values())

    def row(self, names: Sequence[str] = FEATURE_NAMES) -> list[object]:
        """Returns the vector as a features table row.

        Args:
            names (Sequence[str]): Feature columns to emit.
        """
        return [
            self.participant_id,
            self.date.isoformat(),
            self.phq8,
            *(self.values[name] for name in names),
            ';'.join(self.flags),
        ]


class FeatureExtractor:
    """Computes feature vectors of intervals."""

    def __init__(
        self,
        mse_params: MseParams | None = None,
        bands: BandDefinition | None = None,
        threads: int = 1,
    ) -> None:
        """Initialize extractor object.

        Args:
            mse_params (Optional[MseParams]): Entropy parameters.
            bands (Optional[BandDefinition]): Spectral band edges.
            threads (int): Worker threads used across intervals.
        """
        self._logger = log.create_logger(self)
        self.mse_params = mse_params or MseParams()
        self.bands = bands or BandDefinition()
        self.threads = max(1, threads)

    @property
    def feature_names(self) -> tuple[str, ...]:
        """Returns feature names in table order."""
        return (
            *STATISTICAL_FEATURES,
            *self.mse_params.feature_names,
            *FREQUENCY_FEATURES,
        )

    def extract(self, interval: NbdcInterval) -> FeatureVector:
        """Compute all features of one interval.

        Args:
            interval (NbdcInterval): Interval to process.

        Returns:
            FeatureVector: Features with flags of degenerate cases.
        """
        values = second_order_features(interval)
        flags = []

        profile = mse_profile(interval, self.mse_params)
        values.update(profile.as_features())
        flags.extend(f'MSE_{scale}:undefined' for scale in profile.undefined_scales)

        spectrum = power_spectrum(interval.sequence)
        for part in (
            band_features(spectrum, self.bands),
            band_spectral_entropy(spectrum, self.bands),
        ):
            values.update(part.values)
            flags.extend(part.flags)

        flags.extend(
            f'{name}:non_finite'
            for name, value in values.items()
            if not math.isfinite(value)
        )
        return FeatureVector(
            participant_id=interval.participant_id,
            date=interval.phq8.completion_date,
            phq8=interval.phq8.score,
            values=values,
            flags=tuple(flags),
        )

    def extract_all(self, intervals: Iterable[NbdcInterval]) -> list[FeatureVector]:
        """Compute features of many intervals preserving their order.

        Args:
            intervals (Iterable[NbdcInterval]): Intervals to process.

        Returns:
            list[FeatureVector]: One vector per interval.
        """
        intervals = list(intervals)
        self._logger.info(
            'Extracting features of %d intervals with %d threads',
            len(intervals),
            self.threads,
        )
        if self.threads == 1:
            vectors = [self.extract(interval) for interval in intervals]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                vectors = list(executor.map(self.extract, intervals))
        for vector in vectors:
            if not vector.finite:
                self._logger.warning(
                    'Non-finite features of %s@%s',
                    vector.participant_id,
                    vector.date,
                )
        return vectors

    def to_frame(self, vectors: Iterable[FeatureVector]) -> pd.DataFrame:
        """Build the features table.

        Args:
            vectors (Iterable[FeatureVector]): Feature vectors.

        Returns:
            DataFrame: One row per interval, identity columns first,
                features in table order, flags last.
        """
        names = self.feature_names
        return pd.DataFrame(
            [vector.row(names) for vector in vectors],
            columns=[*ID_COLUMNS, *names, FLAGS_COLUMN],
        )


def extract_features(
    interval: NbdcInterval,
    mse_params: MseParams | None = None,
    bands: BandDefinition | None = None,
) -> FeatureVector:
    """Compute all features of one interval.

    Args:
        interval (NbdcInterval): Interval to process.
        mse_params (Optional[MseParams]): Entropy parameters.
        bands (Optional[BandDefinition]): Spectral band edges.

    Returns:
        FeatureVector: Features of the interval.
    """
    return FeatureExtractor(mse_params, bands).extract(interval)


def feature_matrix(
    frame: pd.DataFrame,
    names: Sequence[str] = FEATURE_NAMES,
) -> np.ndarray:
    """Returns the feature columns of a features table as floats.

    Args:
        frame (DataFrame): Features table.
        names (Sequence[str]): Columns to select.
    """
    return frame.loc[:, list(names)].to_numpy(dtype=float)
