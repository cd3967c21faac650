"""Likelihood-ratio tests between nested mixed models."""

from collections.abc import Sequence
import dataclasses
import enum

import pandas as pd
import scipy.stats

import log
from model.tables import COVARIATE_COLUMNS

from .errors import NonNestedModelsError
from .lmm import LmmFit
from .lmm import design_matrix
from .lmm import drop_aliased_columns
from .lmm import fit_lmm

LOG_LIKELIHOOD_TOLERANCE = 1e-6


@dataclasses.dataclass(frozen=True)
class LrtResult:
    """Comparison of a smaller model with a larger one nesting it."""

    statistic: float
    df: int
    p_value: float
    small: str = ''
    large: str = ''

    @property
    def critical_value(self) -> float:
        """Returns the 0.05 upper-tail critical value for `df`."""
        return chi2_critical_value(self.df)

    def to_dict(self) -> dict[str, object]:
        """Returns the result as a JSON-compatible dictionary."""
        return {
            'small': self.small,
            'large': self.large,
            'chi2': self.statistic,
            'df': self.df,
            'p': self.p_value,
            'critical_0.05': self.critical_value if self.df > 0 else None,
        }


def chi2_critical_value(df: int, alpha: float = 0.05) -> float:
    """Returns the upper-tail `alpha` quantile of chi-squared.

    Args:
        df (int): Degrees of freedom.
        alpha (float): Upper-tail probability.
    """
    return float(scipy.stats.chi2.isf(alpha, df))


def likelihood_ratio_test(
    fit_small: LmmFit,
    fit_large: LmmFit,
    small: str = '',
    large: str = '',
) -> LrtResult:
    """Test whether the extra fixed effects improve the fit.

    Args:
        fit_small (LmmFit): Nested model.
        fit_large (LmmFit): Nesting model.
        small (str): Label of the nested model.
        large (str): Label of the nesting model.

    Returns:
        LrtResult: Statistic `2 * (ll_large - ll_small)` referred to
            chi-squared with the fixed-effect count difference as df.

    Raises:
        NonNestedModelsError: Fixed effects are not nested or the fits
            use different data.
    """
    logger = log.create_logger(likelihood_ratio_test)
    if not set(fit_small.names) <= set(fit_large.names):
        raise NonNestedModelsError(
            f'Fixed effects {sorted(set(fit_small.names) - set(fit_large.names))} '
            'of the smaller model are missing in the larger one',
        )
    if (fit_small.n_obs, fit_small.n_groups) != (
        fit_large.n_obs,
        fit_large.n_groups,
    ):
        raise NonNestedModelsError('Models were fitted on different data')

    df = len(fit_large.names) - len(fit_small.names)
    difference = fit_large.log_likelihood - fit_small.log_likelihood
    if difference < -LOG_LIKELIHOOD_TOLERANCE:
        logger.warning(
            'Larger model has lower log-likelihood by %.3g', -difference,
        )
    statistic = max(2 * difference, 0.0)
    p_value = float(scipy.stats.chi2.sf(statistic, df)) if df > 0 else 1.0
    return LrtResult(
        statistic=statistic,
        df=df,
        p_value=p_value,
        small=small,
        large=large,
    )


@enum.unique
class NestedModel(enum.StrEnum):
    """Nested fixed-effect specifications compared by the LRT."""
    A = 'A'
    B = 'B'
    C = 'C'

    @property
    def description(self) -> str:
        """Returns a human-readable description of the fixed effects."""
        match self:
            case NestedModel.A:
                return 'demographics'
            case NestedModel.B:
                return 'demographics + statistical features'
            case NestedModel.C:
                return 'demographics + all Bluetooth features'


@dataclasses.dataclass(frozen=True)
class NestedComparison:
    """Fits of the nested models and the tests between them."""

    fits: dict[NestedModel, LmmFit]
    tests: list[LrtResult]
    dropped: dict[NestedModel, list[str]]


def nested_model_tests(
    frame: pd.DataFrame,
    statistical_features: Sequence[str],
    all_features: Sequence[str],
    outcome: str = 'phq8',
    group: str = 'participant_id',
) -> NestedComparison:
    """Fit models A, B, C and compare A-B, B-C and A-C.

    A uses the demographic covariates, B adds the statistical features
    and C adds all features. Columns that are exact linear combinations
    of earlier columns are dropped before fitting, and test df count
    the fixed effects actually estimated.

    Args:
        frame (DataFrame): Features joined with covariates.
        statistical_features (Sequence[str]): Features added by B.
        all_features (Sequence[str]): Features added by C.
        outcome (str): Outcome column.
        group (str): Participant column.

    Returns:
        NestedComparison: Fits and likelihood-ratio tests.
    """
    logger = log.create_logger(nested_model_tests)
    columns = {
        NestedModel.A: list(COVARIATE_COLUMNS),
        NestedModel.B: [*COVARIATE_COLUMNS, *statistical_features],
        NestedModel.C: [*COVARIATE_COLUMNS, *all_features],
    }
    fits = {}
    dropped = {}
    for model, model_columns in columns.items():
        design, aliased = drop_aliased_columns(design_matrix(frame, model_columns))
        if aliased:
            logger.info('Model %s drops aliased columns %s', model, aliased)
        dropped[model] = aliased
        fits[model] = fit_lmm(frame[outcome], design, frame[group])
        logger.info(
            'Model %s: %d fixed effects, log-likelihood %.3f',
            model,
            len(fits[model].names),
            fits[model].log_likelihood,
        )
    pairs = [
        (NestedModel.A, NestedModel.B),
        (NestedModel.B, NestedModel.C),
        (NestedModel.A, NestedModel.C),
    ]
    tests = [
        likelihood_ratio_test(fits[small], fits[large], small, large)
        for small, large in pairs
    ]
    return NestedComparison(fits=fits, tests=tests, dropped=dropped)
