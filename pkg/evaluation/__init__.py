"""This package implements time-series cross-validation."""

from .cv import CvOutcome
from .cv import PREDICTION_COLUMNS
from .cv import RegressorFactory
from .cv import last_observed_scores
from .cv import run_cv
from .cv import split_designs
from .errors import EvaluationError
from .splits import CvSplit
from .splits import check_no_leakage
from .splits import interval_key
from .splits import interval_table
from .splits import lao_splits
from .splits import loo_splits
from .splits import make_splits
from .splits import select_prediction_cohort

__all__ = [
    'CvOutcome',
    'CvSplit',
    'EvaluationError',
    'PREDICTION_COLUMNS',
    'RegressorFactory',
    'check_no_leakage',
    'interval_key',
    'interval_table',
    'lao_splits',
    'last_observed_scores',
    'loo_splits',
    'make_splits',
    'run_cv',
    'select_prediction_cohort',
    'split_designs',
]
