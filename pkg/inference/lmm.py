"""Random-intercept linear mixed models fitted by maximum likelihood.

The model is `y_ij = x_ij' beta + b_j + e_ij` with `b_j ~ N(0, tau2)` and
`e_ij ~ N(0, sigma2)`. Given the variance ratio `lam = tau2 / sigma2`,
`beta` and `sigma2` have closed forms, so the likelihood is profiled and
maximized over `lam` alone.
"""

from collections.abc import Sequence
import dataclasses
import math

import numpy as np
import pandas as pd
import scipy.optimize
import scipy.stats

from .errors import InferenceError
from .errors import RankDeficientError

INTERCEPT = 'Intercept'

_LOG_RATIO_GRID = np.linspace(-14.0, 10.0, 49)
_LOG_RATIO_TOLERANCE = 1e-10


@dataclasses.dataclass(frozen=True)
class LmmFit:
    """Result of a maximum-likelihood random-intercept fit."""

    names: tuple[str, ...]
    estimates: np.ndarray
    standard_errors: np.ndarray
    tau2: float
    sigma2: float
    log_likelihood: float
    n_obs: int
    n_groups: int

    @property
    def n_params(self) -> int:
        """Returns fixed effects plus the two variance parameters."""
        return len(self.names) + 2

    @property
    def z_scores(self) -> np.ndarray:
        """Returns estimates divided by their standard errors."""
        return self.estimates / self.standard_errors

    @property
    def p_values(self) -> np.ndarray:
        """Returns two-sided p-values of the z-tests."""
        return 2 * scipy.stats.norm.sf(np.abs(self.z_scores))

    def coefficient(self, name: str) -> tuple[float, float]:
        """Returns the estimate and standard error of a fixed effect.

        Args:
            name (str): Fixed-effect name.

        Raises:
            KeyError: Unknown fixed effect.
        """
        try:
            index = self.names.index(name)
        except ValueError:
            raise KeyError(name) from None
        return float(self.estimates[index]), float(self.standard_errors[index])

    def summary(self) -> pd.DataFrame:
        """Returns a coefficient table with z-tests."""
        return pd.DataFrame(
            {
                'estimate': self.estimates,
                'se': self.standard_errors,
                'z': self.z_scores,
                'p': self.p_values,
            },
            index=list(self.names),
        )


class _ProfiledLikelihood:
    """Sufficient statistics of the model for fast profiling."""

    def __init__(self, y: np.ndarray, x: np.ndarray, codes: np.ndarray) -> None:
        n_groups = int(codes.max()) + 1
        self.n = y.size
        self.group_sizes = np.bincount(codes, minlength=n_groups).astype(float)
        self.xtx = x.T @ x
        self.xty = x.T @ y
        self.yty = float(y @ y)
        self.group_x = np.zeros((n_groups, x.shape[1]))
        np.add.at(self.group_x, codes, x)
        self.group_y = np.bincount(codes, weights=y, minlength=n_groups)

    def solve(self, ratio: float) -> tuple[np.ndarray, np.ndarray, float, float]:
        """Profile the model at a variance ratio.

        Returns:
            tuple: Fixed effects, `X'WX`, residual variance and the
                profiled log-likelihood.
        """
        shrink = ratio / (1 + ratio * self.group_sizes)
        xwx = self.xtx - self.group_x.T @ (shrink[:, None] * self.group_x)
        xwy = self.xty - self.group_x.T @ (shrink * self.group_y)
        ywy = self.yty - float(shrink @ self.group_y**2)
        beta = np.linalg.solve(xwx, xwy)
        rss = max(ywy - float(xwy @ beta), np.finfo(float).tiny)
        sigma2 = rss / self.n
        log_det = float(np.log1p(ratio * self.group_sizes).sum())
        log_likelihood = (
            -0.5 * self.n * (math.log(2 * math.pi) + 1 + math.log(sigma2))
            - 0.5 * log_det
        )
        return beta, xwx, sigma2, log_likelihood

    def negative_log_likelihood(self, log_ratio: float) -> float:
        return -self.solve(math.exp(log_ratio))[3]


def fit_lmm(
    y: Sequence[float] | np.ndarray,
    x: pd.DataFrame | np.ndarray,
    groups: Sequence[object] | np.ndarray,
    names: Sequence[str] | None = None,
) -> LmmFit:
    """Fit a random-intercept model by maximum likelihood.

    The design `x` is used as is, add an intercept column explicitly.

    Args:
        y (ArrayLike): Outcomes.
        x (DataFrame | ndarray): Fixed-effect design, one row per outcome.
        groups (ArrayLike): Group label of every row.
        names (Optional[Sequence[str]]): Fixed-effect names, taken from
            DataFrame columns by default.

    Returns:
        LmmFit: Fitted model.

    Raises:
        InferenceError: Fewer than two groups or mismatched inputs.
        RankDeficientError: The design does not have full column rank.
    """
    if isinstance(x, pd.DataFrame):
        names = tuple(names or map(str, x.columns))
        x = x.to_numpy(dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(y, dtype=float)
    names = tuple(names or (f'x{i}' for i in range(x.shape[1])))
    if len(names) != x.shape[1] or y.size != x.shape[0]:
        raise InferenceError('Design, outcome and names sizes do not match')
    codes, uniques = pd.factorize(np.asarray(groups, dtype=object))
    if codes.size != y.size:
        raise InferenceError('Every outcome needs a group label')
    if len(uniques) < 2:
        raise InferenceError('Random intercepts need at least two groups')
    if not (np.isfinite(y).all() and np.isfinite(x).all()):
        raise InferenceError('Outcome and design must be finite')
    if np.linalg.matrix_rank(x) < x.shape[1]:
        raise RankDeficientError(
            f'Design of {x.shape[1]} columns {list(names)} is rank deficient',
        )

    profile = _ProfiledLikelihood(y, x, codes)
    log_ratio = _maximize(profile)
    best = profile.solve(math.exp(log_ratio))
    ratio = math.exp(log_ratio)
    # Boundary at tau2 = 0 is not reachable in log scale
    boundary = profile.solve(0.0)
    if boundary[3] >= best[3]:
        best, ratio = boundary, 0.0

    beta, xwx, sigma2, log_likelihood = best
    try:
        covariance = sigma2 * np.linalg.inv(xwx)
    except np.linalg.LinAlgError as e:
        raise RankDeficientError(str(e)) from e
    return LmmFit(
        names=names,
        estimates=beta,
        standard_errors=np.sqrt(np.diag(covariance)),
        tau2=ratio * sigma2,
        sigma2=sigma2,
        log_likelihood=log_likelihood,
        n_obs=int(y.size),
        n_groups=len(uniques),
    )


def _maximize(profile: _ProfiledLikelihood) -> float:
    """Internal helper to find the best log variance ratio.

    A coarse grid brackets the optimum, then a bounded Brent search
    refines it.
    """
    values = [profile.negative_log_likelihood(v) for v in _LOG_RATIO_GRID]
    best = int(np.argmin(values))
    low = _LOG_RATIO_GRID[max(best - 1, 0)]
    high = _LOG_RATIO_GRID[min(best + 1, _LOG_RATIO_GRID.size - 1)]
    result = scipy.optimize.minimize_scalar(
        profile.negative_log_likelihood,
        bounds=(low, high),
        method='bounded',
        options={'xatol': _LOG_RATIO_TOLERANCE},
    )
    if result.fun <= values[best]:
        return float(result.x)
    return float(_LOG_RATIO_GRID[best])


def design_matrix(
    frame: pd.DataFrame,
    columns: Sequence[str],
    intercept: bool = True,
) -> pd.DataFrame:
    """Select fixed-effect columns and prepend an intercept.

    Args:
        frame (DataFrame): Source table.
        columns (Sequence[str]): Columns to use.
        intercept (bool): Whether to add an intercept column.

    Returns:
        DataFrame: Float design.
    """
    design = frame.loc[:, list(columns)].astype(float)
    if intercept:
        design.insert(0, INTERCEPT, 1.0)
    return design


def drop_aliased_columns(
    design: pd.DataFrame,
    tolerance: float = 1e-9,
) -> tuple[pd.DataFrame, list[str]]:
    """Drop columns that are linear combinations of earlier columns.

    Columns are scaled to unit norm before rank checks so features on
    very different scales are judged alike.

    Args:
        design (DataFrame): Fixed-effect design.
        tolerance (float): Relative singular value threshold.

    Returns:
        tuple[DataFrame, list[str]]: Reduced design and dropped columns.
    """
    values = design.to_numpy(dtype=float)
    norms = np.linalg.norm(values, axis=0)
    scaled = values / np.where(norms > 0, norms, 1.0)
    kept: list[int] = []
    dropped = []
    for index, name in enumerate(design.columns):
        candidate = scaled[:, [*kept, index]]
        singular = np.linalg.svd(candidate, compute_uv=False)
        if norms[index] > 0 and singular[-1] > tolerance * singular[0]:
            kept.append(index)
        else:
            dropped.append(str(name))
    return design.iloc[:, kept], dropped
