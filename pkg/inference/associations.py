"""Pairwise associations between PHQ-8 and each feature."""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
import dataclasses
import math

import numpy as np
import pandas as pd

import log
from model.tables import COVARIATE_COLUMNS

from .errors import InferenceError
from .lmm import design_matrix
from .lmm import fit_lmm
from .multiple import bh_adjust

ASSOCIATION_COLUMNS = (
    'feature',
    'estimate',
    'se',
    'z',
    'p',
    'p_adjusted',
    'n_obs',
    'n_groups',
    'skipped',
)


@dataclasses.dataclass(frozen=True)
class AssociationResult:
    """Association of one feature with PHQ-8 adjusted for covariates.

    Skipped tests hold NaN statistics and the reason in `skipped`.
    """

    feature: str
    estimate: float
    se: float
    z: float
    p: float
    p_adjusted: float
    n_obs: int = 0
    n_groups: int = 0
    skipped: str = ''

    @property
    def significant(self) -> bool:
        """Returns `True` if the adjusted p-value is below 0.05."""
        return not self.skipped and self.p_adjusted < 0.05


def pairwise_associations(
    frame: pd.DataFrame,
    features: Sequence[str],
    outcome: str = 'phq8',
    group: str = 'participant_id',
    covariates: Sequence[str] = COVARIATE_COLUMNS,
    threads: int = 1,
) -> list[AssociationResult]:
    """Fit one random-intercept model per feature.

    Each model has an intercept, the feature and the covariates as
    fixed effects and a participant random intercept. Feature p-values
    come from z-tests and are adjusted together by Benjamini-Hochberg.

    Args:
        frame (DataFrame): Features joined with covariates.
        features (Sequence[str]): Features to test.
        outcome (str): Outcome column.
        group (str): Participant column.
        covariates (Sequence[str]): Adjustment columns.
        threads (int): Worker threads used across features.

    Returns:
        list[AssociationResult]: One result per feature in input order.
    """
    logger = log.create_logger(pairwise_associations)
    if not features:
        return []

    def test(feature: str) -> AssociationResult:
        column = frame[feature].to_numpy(dtype=float)
        if not np.isfinite(column).all():
            return _skipped(feature, 'non-finite values')
        if np.ptp(column) == 0:
            return _skipped(feature, 'constant feature')
        design = design_matrix(frame, [feature, *covariates])
        try:
            fit = fit_lmm(frame[outcome], design, frame[group])
        except InferenceError as e:
            return _skipped(feature, str(e))
        estimate, se = fit.coefficient(feature)
        index = fit.names.index(feature)
        return AssociationResult(
            feature=feature,
            estimate=estimate,
            se=se,
            z=estimate / se,
            p=float(fit.p_values[index]),
            p_adjusted=math.nan,
            n_obs=fit.n_obs,
            n_groups=fit.n_groups,
        )

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        results = list(executor.map(test, features))

    tested = [i for i, r in enumerate(results) if not r.skipped]
    adjusted = bh_adjust([results[i].p for i in tested])
    for i, q in zip(tested, adjusted):
        results[i] = dataclasses.replace(results[i], p_adjusted=float(q))
    for result in results:
        if result.skipped:
            logger.warning('Skipped %s: %s', result.feature, result.skipped)
    logger.info(
        'Tested %d features, %d significant after adjustment',
        len(tested),
        sum(r.significant for r in results),
    )
    return results


def associations_frame(results: Sequence[AssociationResult]) -> pd.DataFrame:
    """Returns results as a table with `ASSOCIATION_COLUMNS`.

    Args:
        results (Sequence[AssociationResult]): Association results.
    """
    return pd.DataFrame(
        [dataclasses.astuple(r) for r in results],
        columns=list(ASSOCIATION_COLUMNS),
    )


def _skipped(feature: str, reason: str) -> AssociationResult:
    """Internal helper to create a result of a skipped test."""
    return AssociationResult(
        feature=feature,
        estimate=math.nan,
        se=math.nan,
        z=math.nan,
        p=math.nan,
        p_adjusted=math.nan,
        skipped=reason,
    )
