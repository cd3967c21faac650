"""Cross-validation harness pooling predictions over splits."""

from collections.abc import Callable
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
import dataclasses

import numpy as np
import pandas as pd

import log
from model.types import ProxipheneError
from prediction.design import PredictionDesign
from prediction.metrics import MetricsReport
from prediction.metrics import evaluate
from prediction.models import Regressor

from .errors import EvaluationError
from .splits import CvSplit
from .splits import KEY
from .splits import POSITION
from .splits import interval_table

RegressorFactory = Callable[[CvSplit], Regressor]
"""Creates an unfitted regressor for a split."""

PREDICTION_COLUMNS = (
    'scheme',
    'iteration',
    'participant_id',
    'date',
    'target',
    'prediction',
)


@dataclasses.dataclass(frozen=True)
class CvOutcome:
    """Pooled metrics and per-row predictions of one model and scheme."""

    metrics: MetricsReport
    predictions: pd.DataFrame


def last_observed_scores(
    table: pd.DataFrame,
    split: CvSplit,
) -> tuple[np.ndarray, np.ndarray]:
    """Find the last PHQ-8 score observed before every split row.

    A training row takes the score of the participant's previous
    training interval. A test row takes the score of the participant's
    latest training interval. Rows without such an interval take the
    mean training score.

    Args:
        table (DataFrame): Interval table with `phq8`.
        split (CvSplit): Split.

    Returns:
        tuple[ndarray, ndarray]: Last scores of training and test rows
            in split order.
    """
    indexed = table.set_index(KEY)
    train = indexed.loc[list(split.train)].sort_values(
        ['participant_id', POSITION],
    )
    fallback = float(train['phq8'].mean())
    previous = train.groupby('participant_id')['phq8'].shift(1)
    train_last = previous.fillna(fallback).astype(float)
    latest = train.groupby('participant_id')['phq8'].last().astype(float)

    test = indexed.loc[list(split.test)]
    test_last = [
        float(latest.get(participant, fallback))
        for participant in test['participant_id']
    ]
    return (
        train_last.loc[list(split.train)].to_numpy(dtype=float),
        np.asarray(test_last, dtype=float),
    )


def split_designs(
    table: pd.DataFrame,
    split: CvSplit,
    feature_names: Sequence[str],
) -> tuple[PredictionDesign, PredictionDesign]:
    """Build training and test designs of a split.

    Args:
        table (DataFrame): Interval table joined with covariates and
            features.
        split (CvSplit): Split.
        feature_names (Sequence[str]): Feature columns.

    Returns:
        tuple[PredictionDesign, PredictionDesign]: Training and test rows.
    """
    indexed = table.set_index(KEY, drop=False)
    train_last, test_last = last_observed_scores(table, split)
    train = PredictionDesign.from_frame(
        indexed.loc[list(split.train)],
        feature_names,
        train_last,
    )
    test = PredictionDesign.from_frame(
        indexed.loc[list(split.test)],
        feature_names,
        test_last,
    )
    return train, test


def run_cv(
    factory: RegressorFactory,
    splits: Sequence[CvSplit],
    table: pd.DataFrame,
    feature_names: Sequence[str],
    model: str = '',
    threads: int = 1,
) -> CvOutcome:
    """Fit a model on every split and pool its test predictions.

    Args:
        factory (RegressorFactory): Creates the model of a split.
        splits (Sequence[CvSplit]): Splits of one scheme.
        table (DataFrame): Interval table joined with covariates and
            features.
        feature_names (Sequence[str]): Feature columns.
        model (str): Model tag of the metrics.
        threads (int): Worker threads used across splits.

    Returns:
        CvOutcome: Pooled metrics and predictions in split order.

    Raises:
        EvaluationError: No splits, or a fit failed.
    """
    logger = log.create_logger(run_cv)
    if not splits:
        raise EvaluationError(f'No cross-validation splits for {model}')
    table = interval_table(table)
    scheme = splits[0].scheme

    def run(split: CvSplit) -> pd.DataFrame:
        train, test = split_designs(table, split, feature_names)
        try:
            predicted = factory(split).fit(train).predict(test)
        except (ProxipheneError, np.linalg.LinAlgError, ValueError) as e:
            raise EvaluationError(
                f'{model} failed on {split.scheme} iteration '
                f'{split.iteration} ({len(train)} training rows, '
                f'{len(test)} test rows): {e}',
            ) from e
        logger.debug(
            '%s %s iteration %d: %d test rows',
            model,
            split.scheme,
            split.iteration,
            len(test),
        )
        return pd.DataFrame({
            'scheme': str(split.scheme),
            'iteration': split.iteration,
            'participant_id': test.participant_ids,
            'date': list(test.dates),
            'target': test.target,
            'prediction': predicted,
        })

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        parts = list(executor.map(run, splits))
    predictions = pd.concat(parts, ignore_index=True)
    metrics = evaluate(
        predictions['prediction'],
        predictions['target'],
        scheme=scheme,
        model=model,
    )
    logger.info(
        '%s %s: R2=%.3f RMSE=%.3f over %d test rows',
        model,
        scheme,
        metrics.r2,
        metrics.rmse,
        metrics.n_test,
    )
    return CvOutcome(metrics=metrics, predictions=predictions)
