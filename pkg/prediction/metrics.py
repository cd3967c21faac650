"""Prediction accuracy metrics."""

from collections.abc import Sequence
import dataclasses
import enum
import math

import numpy as np

from .errors import PredictionError


@enum.unique
class Scheme(enum.StrEnum):
    """Time-series cross-validation schemes."""
    LAO = 'lao'
    LOO = 'loo'


@dataclasses.dataclass(frozen=True)
class MetricsReport:
    """Pooled accuracy of one model under one scheme.

    `r2` is NaN when the test targets have no variance.
    """

    r2: float
    rmse: float
    n_test: int
    scheme: str = ''
    model: str = ''

    def to_dict(self) -> dict[str, object]:
        """Returns the report as a JSON-compatible dictionary."""
        return {
            'model': self.model,
            'scheme': self.scheme,
            'r2': self.r2 if math.isfinite(self.r2) else None,
            'rmse': self.rmse,
            'n_test': self.n_test,
        }


def evaluate(
    predictions: Sequence[float] | np.ndarray,
    targets: Sequence[float] | np.ndarray,
    scheme: str = '',
    model: str = '',
) -> MetricsReport:
    """Compute R-squared and RMSE of pooled predictions.

    R-squared is centered on the mean of the pooled test targets.

    Args:
        predictions (ArrayLike): Predicted scores.
        targets (ArrayLike): Observed scores.
        scheme (str): Scheme tag.
        model (str): Model tag.

    Returns:
        MetricsReport: Pooled metrics.

    Raises:
        PredictionError: Inputs are empty or of different lengths.
    """
    predicted = np.asarray(predictions, dtype=float)
    observed = np.asarray(targets, dtype=float)
    if predicted.shape != observed.shape or observed.size == 0:
        raise PredictionError(
            'Predictions and targets must be non-empty and of equal length',
        )
    residual = float(((observed - predicted) ** 2).sum())
    total = float(((observed - observed.mean()) ** 2).sum())
    return MetricsReport(
        r2=1 - residual / total if total > 0 else math.nan,
        rmse=math.sqrt(residual / observed.size),
        n_test=int(observed.size),
        scheme=str(scheme),
        model=model,
    )
