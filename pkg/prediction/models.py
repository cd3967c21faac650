"""Prediction models compared by cross-validation."""

import abc
import dataclasses
import enum

import numpy as np

import log

from .design import FeatureSubset
from .design import PredictionDesign
from .design import Standardizer
from .errors import PredictionError
from .hblr import HblrData
from .hblr import HblrSettings
from .hblr import PosteriorSamples
from .hblr import fit_hblr
from .hblr import predict_hblr
from .lasso import LassoFit
from .lasso import fit_lasso
from .lasso import select_penalty


@enum.unique
class ModelKind(enum.StrEnum):
    """Families of prediction models."""
    HBLR = enum.auto()
    LASSO = enum.auto()
    LAST = enum.auto()


@dataclasses.dataclass(frozen=True)
class ModelSpec:
    """A named model with the Bluetooth features it uses."""

    name: str
    kind: ModelKind
    subset: FeatureSubset
    description: str


MODEL_SPECS = {
    spec.name: spec
    for spec in (
        ModelSpec(
            'hblr',
            ModelKind.HBLR,
            FeatureSubset.ALL,
            'Hierarchical Bayesian linear (all Bluetooth features)',
        ),
        ModelSpec(
            'hblr-stat',
            ModelKind.HBLR,
            FeatureSubset.STATISTICAL,
            'Hierarchical Bayesian linear (statistical features)',
        ),
        ModelSpec(
            'baseline',
            ModelKind.HBLR,
            FeatureSubset.NONE,
            'Baseline (no Bluetooth features)',
        ),
        ModelSpec(
            'lasso',
            ModelKind.LASSO,
            FeatureSubset.ALL,
            'LASSO (all Bluetooth features)',
        ),
        ModelSpec(
            'last',
            ModelKind.LAST,
            FeatureSubset.NONE,
            'Last observed PHQ-8 score',
        ),
    )
}
"""Known models by name."""


class Regressor(abc.ABC):
    """Base class of prediction models.

    Predictors are standardized with statistics of the training rows
    passed to `fit`.
    """

    def __init__(self, spec: ModelSpec, clip: bool = False) -> None:
        """Initialize a regressor object.

        Args:
            spec (ModelSpec): Model to fit.
            clip (bool): Whether to clip predictions to 0..24.
        """
        super().__init__()
        self.spec = spec
        self.clip = clip
        self._standardizer = Standardizer()
        self._logger = log.create_logger(self)

    def fit(self, train: PredictionDesign) -> 'Regressor':
        """Fit the model on training rows.

        Args:
            train (PredictionDesign): Training rows.

        Returns:
            Regressor: This object.

        Raises:
            PredictionError: The model cannot be fitted.
        """
        if len(train) == 0:
            raise PredictionError(f'No training rows for {self.spec.name}')
        z = self._standardizer.fit(
            train.predictors(self.spec.subset),
        ).transform(train.predictors(self.spec.subset))
        self._fit(train, z)
        return self

    def predict(self, test: PredictionDesign) -> np.ndarray:
        """Predict scores of test rows.

        Args:
            test (PredictionDesign): Test rows.

        Returns:
            ndarray: Predicted scores.
        """
        z = self._standardizer.transform(test.predictors(self.spec.subset))
        predicted = self._predict(test, z)
        if self.clip:
            predicted = np.clip(predicted, 0, 24)
        return predicted

    @abc.abstractmethod
    def _fit(self, train: PredictionDesign, z: np.ndarray) -> None:
        """Fit the model on standardized training predictors.

        Args:
            train (PredictionDesign): Training rows.
            z (ndarray): Standardized predictors.
        """

    @abc.abstractmethod
    def _predict(self, test: PredictionDesign, z: np.ndarray) -> np.ndarray:
        """Predict from standardized test predictors.

        Args:
            test (PredictionDesign): Test rows.
            z (ndarray): Standardized predictors.

        Returns:
            ndarray: Predicted scores.
        """


class HblrRegressor(Regressor):
    """Hierarchical Bayesian linear regression."""

    def __init__(
        self,
        spec: ModelSpec,
        settings: HblrSettings | None = None,
        seed: int = 0,
        clip: bool = False,
    ) -> None:
        """Initialize a regressor object.

        Args:
            spec (ModelSpec): Model to fit.
            settings (Optional[HblrSettings]): Sampler settings.
            seed (int): Seed of the sampler and predictions.
            clip (bool): Whether to clip predictions to 0..24.
        """
        super().__init__(spec, clip)
        self.settings = settings or HblrSettings()
        self.seed = seed
        self.posterior: PosteriorSamples | None = None

    def _fit(self, train: PredictionDesign, z: np.ndarray) -> None:
        data = HblrData.from_arrays(train.target, z, train.participant_ids)
        self.posterior = fit_hblr(
            data,
            self.settings,
            seed=self.seed,
            predictor_names=train.predictor_names(self.spec.subset),
        )

    def _predict(self, test: PredictionDesign, z: np.ndarray) -> np.ndarray:
        if self.posterior is None:
            raise PredictionError('Model is not fitted')
        return predict_hblr(
            self.posterior,
            z,
            test.participant_ids,
            level=self.settings.interval_level,
            include_noise=self.settings.include_noise,
            seed=self.seed,
        ).mean


class LassoRegressor(Regressor):
    """LASSO with a penalty chosen by grouped cross-validation."""

    def __init__(self, spec: ModelSpec, clip: bool = False) -> None:
        """Initialize a regressor object.

        Args:
            spec (ModelSpec): Model to fit.
            clip (bool): Whether to clip predictions to 0..24.
        """
        super().__init__(spec, clip)
        self.result: LassoFit | None = None

    def _fit(self, train: PredictionDesign, z: np.ndarray) -> None:
        penalty = select_penalty(z, train.target, train.participant_ids)
        self.result = fit_lasso(z, train.target, penalty)

    def _predict(self, test: PredictionDesign, z: np.ndarray) -> np.ndarray:
        if self.result is None:
            raise PredictionError('Model is not fitted')
        return self.result.predict(z)


class LastScoreRegressor(Regressor):
    """Predicts the last observed score."""

    def _fit(self, train: PredictionDesign, z: np.ndarray) -> None:
        pass

    def _predict(self, test: PredictionDesign, z: np.ndarray) -> np.ndarray:
        return test.last_score.copy()


def create_regressor(
    spec: ModelSpec,
    settings: HblrSettings | None = None,
    seed: int = 0,
    clip: bool = False,
) -> Regressor:
    """Create an unfitted regressor of a model.

    Args:
        spec (ModelSpec): Model to create.
        settings (Optional[HblrSettings]): Sampler settings.
        seed (int): Seed of random models.
        clip (bool): Whether to clip predictions to 0..24.

    Returns:
        Regressor: New regressor.
    """
    match spec.kind:
        case ModelKind.HBLR:
            return HblrRegressor(spec, settings, seed, clip)
        case ModelKind.LASSO:
            return LassoRegressor(spec, clip)
        case ModelKind.LAST:
            return LastScoreRegressor(spec, clip)
