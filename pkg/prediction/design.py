"""Prediction design rows and predictor standardization."""

from collections.abc import Sequence
import dataclasses
import enum

import numpy as np
import pandas as pd
from sklearn.preprocessing import StandardScaler

from features.statistical import STATISTICAL_FEATURES
from model.tables import COVARIATE_COLUMNS

from .errors import PredictionError

LAST_SCORE = 'last_phq8'


@enum.unique
class FeatureSubset(enum.StrEnum):
    """Which Bluetooth features enter a model."""
    ALL = 'all'
    STATISTICAL = 'statistical'
    NONE = 'none'

    def select(self, names: Sequence[str]) -> list[str]:
        """Returns the names of a feature list kept by the subset.

        Args:
            names (Sequence[str]): Available feature names.
        """
        match self:
            case FeatureSubset.ALL:
                return list(names)
            case FeatureSubset.STATISTICAL:
                return [n for n in names if n in STATISTICAL_FEATURES]
            case FeatureSubset.NONE:
                return []


@dataclasses.dataclass(frozen=True)
class PredictionDesign:
    """Rows of a prediction problem.

    Every row has a target score, the last PHQ-8 score observed before
    it, demographic covariates and Bluetooth features.
    """

    participant_ids: np.ndarray
    dates: tuple[str, ...]
    target: np.ndarray
    last_score: np.ndarray
    covariates: np.ndarray
    features: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        n = len(self.participant_ids)
        sizes = {
            len(self.dates),
            self.target.shape[0],
            self.last_score.shape[0],
            self.covariates.shape[0],
            self.features.shape[0],
        }
        if sizes != {n}:
            raise PredictionError('Design columns have different lengths')
        if self.features.shape[1] != len(self.feature_names):
            raise PredictionError('Feature names do not match feature columns')

    def __len__(self) -> int:
        return len(self.participant_ids)

    @classmethod
    def from_frame(
        cls,
        frame: pd.DataFrame,
        feature_names: Sequence[str],
        last_score: Sequence[float] | np.ndarray,
    ) -> 'PredictionDesign':
        """Create a design from a joined features table.

        Args:
            frame (DataFrame): Rows with identity, covariate and feature
                columns.
            feature_names (Sequence[str]): Feature columns.
            last_score (ArrayLike): Last observed score of every row.

        Returns:
            PredictionDesign: Design of the rows.
        """
        return cls(
            participant_ids=frame['participant_id'].astype(str).to_numpy(),
            dates=tuple(frame['date'].astype(str)),
            target=frame['phq8'].to_numpy(dtype=float),
            last_score=np.asarray(last_score, dtype=float),
            covariates=frame.loc[:, list(COVARIATE_COLUMNS)].to_numpy(dtype=float),
            features=frame.loc[:, list(feature_names)].to_numpy(dtype=float),
            feature_names=tuple(feature_names),
        )

    def predictor_names(self, subset: FeatureSubset) -> list[str]:
        """Returns predictor names of a feature subset.

        Args:
            subset (FeatureSubset): Bluetooth features to include.
        """
        return [
            LAST_SCORE,
            *COVARIATE_COLUMNS,
            *subset.select(self.feature_names),
        ]

    def predictors(self, subset: FeatureSubset) -> np.ndarray:
        """Returns the unstandardized predictor matrix of a subset.

        Args:
            subset (FeatureSubset): Bluetooth features to include.
        """
        selected = subset.select(self.feature_names)
        indices = [self.feature_names.index(name) for name in selected]
        return np.column_stack([
            self.last_score,
            self.covariates,
            self.features[:, indices],
        ])


class Standardizer:
    """Centers and scales predictors with statistics of training rows.

    Columns without spread in training rows are mapped to 0.
    """

    def __init__(self) -> None:
        """Initialize standardizer object."""
        self._scaler = StandardScaler()
        self._constant: np.ndarray | None = None

    def fit(self, x: np.ndarray) -> 'Standardizer':
        """Freeze column statistics of training rows.

        Args:
            x (ndarray): Training predictors.

        Returns:
            Standardizer: This object.
        """
        self._scaler.fit(x)
        self._constant = self._scaler.var_ == 0
        return self

    def transform(self, x: np.ndarray) -> np.ndarray:
        """Standardize predictors with the frozen statistics.

        Args:
            x (ndarray): Predictors of any rows.

        Returns:
            ndarray: Standardized predictors.

        Raises:
            PredictionError: The standardizer was not fitted.
        """
        if self._constant is None:
            raise PredictionError('Standardizer is not fitted')
        result = self._scaler.transform(x)
        result[:, self._constant] = 0.0
        return result
