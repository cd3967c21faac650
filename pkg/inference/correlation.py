"""Rank correlations between features."""

import dataclasses

import numpy as np
import pandas as pd
import scipy.stats

from .errors import InferenceError

MIN_ROWS = 3


@dataclasses.dataclass(frozen=True)
class SpearmanMatrix:
    """Pairwise Spearman correlations.

    Correlations involving a constant column are 0 and the column is
    listed in `constant`.
    """

    matrix: pd.DataFrame
    constant: tuple[str, ...] = ()


def spearman_matrix(frame: pd.DataFrame) -> SpearmanMatrix:
    """Compute pairwise Spearman correlations of all columns.

    Ties get average ranks. The diagonal is 1.

    Args:
        frame (DataFrame): Numeric columns to correlate.

    Returns:
        SpearmanMatrix: Symmetric correlation matrix.

    Raises:
        InferenceError: Fewer than three rows or non-finite values.
    """
    values = frame.to_numpy(dtype=float)
    if values.shape[0] < MIN_ROWS:
        raise InferenceError(
            f'Spearman correlation needs at least {MIN_ROWS} rows',
        )
    if not np.isfinite(values).all():
        raise InferenceError('Spearman correlation needs finite values')
    ranks = scipy.stats.rankdata(values, method='average', axis=0)
    centered = ranks - ranks.mean(axis=0)
    norms = np.sqrt((centered**2).sum(axis=0))
    constant = norms == 0
    unit = centered / np.where(constant, 1.0, norms)
    matrix = np.clip(unit.T @ unit, -1.0, 1.0)
    matrix[constant, :] = 0.0
    matrix[:, constant] = 0.0
    np.fill_diagonal(matrix, 1.0)
    columns = [str(c) for c in frame.columns]
    return SpearmanMatrix(
        matrix=pd.DataFrame(matrix, index=columns, columns=columns),
        constant=tuple(c for c, flag in zip(columns, constant) if flag),
    )
