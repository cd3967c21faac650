"""LASSO regression fitted by cyclic coordinate descent.

The objective is `(1 / 2n) * ||y - b0 - Z b||^2 + lam * ||b||_1` with an
unpenalized intercept. Coordinates are updated on centered data by
soft-thresholding, the intercept is recovered from the means.
"""

from collections.abc import Sequence
import dataclasses
import math

import numpy as np
from sklearn.model_selection import GroupKFold

import log

CONVERGENCE_TOLERANCE = 1e-8
MAX_SWEEPS = 100_000
N_PENALTIES = 50
PENALTY_RATIO = 1e-3
N_FOLDS = 5


def soft_threshold(value: float, threshold: float) -> float:
    """Shrink a value towards zero by a threshold.

    Args:
        value (float): Value to shrink.
        threshold (float): Non-negative threshold.
    """
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


@dataclasses.dataclass(frozen=True)
class LassoFit:
    """Fitted LASSO coefficients.

    `objective` holds the objective value after every sweep.
    """

    intercept: float
    coef: np.ndarray
    penalty: float
    objective: tuple[float, ...]
    converged: bool

    def predict(self, z: np.ndarray) -> np.ndarray:
        """Returns predictions of rows.

        Args:
            z (ndarray): Predictors on the training scale.
        """
        return self.intercept + np.asarray(z, dtype=float) @ self.coef


def fit_lasso(
    z: np.ndarray,
    y: Sequence[float] | np.ndarray,
    penalty: float,
    initial: np.ndarray | None = None,
    tolerance: float = CONVERGENCE_TOLERANCE,
    max_sweeps: int = MAX_SWEEPS,
) -> LassoFit:
    """Minimize the LASSO objective by coordinate descent.

    Sweeps stop when no coefficient changes by more than `tolerance`.

    Args:
        z (ndarray): Predictors, ideally standardized.
        y (ArrayLike): Targets.
        penalty (float): Non-negative L1 weight.
        initial (Optional[ndarray]): Warm start coefficients.
        tolerance (float): Largest coefficient change at convergence.
        max_sweeps (int): Sweep limit.

    Returns:
        LassoFit: Coefficients, intercept and objective history.

    Raises:
        ValueError: Negative penalty.
    """
    logger = log.create_logger(fit_lasso)
    if penalty < 0:
        raise ValueError(f'Penalty must be non-negative, got {penalty}')
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = z.shape
    z_mean = z.mean(axis=0)
    y_mean = float(y.mean())
    centered = z - z_mean
    scale = (centered**2).sum(axis=0) / n

    coef = np.zeros(p) if initial is None else np.array(initial, dtype=float)
    residual = (y - y_mean) - centered @ coef
    objective = []
    converged = False
    for _ in range(max_sweeps):
        largest_change = 0.0
        for j in range(p):
            if scale[j] == 0:
                new = 0.0
            else:
                rho = float(centered[:, j] @ residual) / n + scale[j] * coef[j]
                new = soft_threshold(rho, penalty) / scale[j]
            change = new - coef[j]
            if change:
                residual -= centered[:, j] * change
                coef[j] = new
                largest_change = max(largest_change, abs(change))
        value = float(residual @ residual) / (2 * n) + penalty * float(
            np.abs(coef).sum(),
        )
        if objective and value > objective[-1] + 1e-12 * (1 + abs(value)):
            logger.warning(
                'LASSO objective increased from %.12g to %.12g',
                objective[-1],
                value,
            )
        objective.append(value)
        if largest_change < tolerance:
            converged = True
            break
    if not converged:
        logger.warning('LASSO did not converge in %d sweeps', max_sweeps)
    return LassoFit(
        intercept=y_mean - float(z_mean @ coef),
        coef=coef,
        penalty=penalty,
        objective=tuple(objective),
        converged=converged,
    )


def max_penalty(z: np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Returns the smallest penalty giving all-zero coefficients.

    Args:
        z (ndarray): Predictors.
        y (ArrayLike): Targets.
    """
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    centered = z - z.mean(axis=0)
    return float(np.abs(centered.T @ (y - y.mean())).max(initial=0.0)) / len(y)


def penalty_grid(
    z: np.ndarray,
    y: Sequence[float] | np.ndarray,
    n_penalties: int = N_PENALTIES,
    ratio: float = PENALTY_RATIO,
) -> np.ndarray:
    """Returns a decreasing logarithmic grid of penalties.

    Args:
        z (ndarray): Predictors.
        y (ArrayLike): Targets.
        n_penalties (int): Grid size.
        ratio (float): Smallest penalty relative to the largest one.
    """
    largest = max_penalty(z, y)
    if largest == 0:
        return np.zeros(1)
    return np.geomspace(largest, largest * ratio, n_penalties)


def select_penalty(
    z: np.ndarray,
    y: Sequence[float] | np.ndarray,
    groups: Sequence[object] | np.ndarray,
    n_penalties: int = N_PENALTIES,
    n_folds: int = N_FOLDS,
) -> float:
    """Choose the penalty by participant-grouped cross-validation.

    Args:
        z (ndarray): Standardized predictors.
        y (ArrayLike): Targets.
        groups (ArrayLike): Participant of every row.
        n_penalties (int): Grid size.
        n_folds (int): Folds, reduced to the participant count if needed.

    Returns:
        float: Penalty with the lowest mean held-out squared error.
    """
    logger = log.create_logger(select_penalty)
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    groups = np.asarray(groups, dtype=object)
    grid = penalty_grid(z, y, n_penalties)
    n_groups = len(set(groups))
    if grid.size == 1 or n_groups < 2:
        return float(grid[-1])

    errors = np.zeros(grid.size)
    folds = GroupKFold(n_splits=min(n_folds, n_groups))
    for train, test in folds.split(z, y, groups):
        coef = None
        for index, penalty in enumerate(grid):
            fit = fit_lasso(z[train], y[train], penalty, initial=coef)
            coef = fit.coef
            residual = y[test] - fit.predict(z[test])
            errors[index] += float(residual @ residual)
    best = float(grid[int(np.argmin(errors))])
    logger.debug('Selected LASSO penalty %.4g', best)
    return best


def lasso_objective(
    fit: LassoFit,
    z: np.ndarray,
    y: Sequence[float] | np.ndarray,
) -> float:
    """Returns the objective value of a fit on data.

    Args:
        fit (LassoFit): Fitted coefficients.
        z (ndarray): Predictors.
        y (ArrayLike): Targets.
    """
    residual = np.asarray(y, dtype=float) - fit.predict(z)
    return float(residual @ residual) / (2 * len(residual)) + fit.penalty * (
        math.fsum(np.abs(fit.coef))
    )
