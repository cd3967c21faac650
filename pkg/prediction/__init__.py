"""This package implements PHQ-8 prediction models and their metrics."""

from .design import FeatureSubset
from .design import LAST_SCORE
from .design import PredictionDesign
from .design import Standardizer
from .errors import PredictionError
from .hblr import GibbsState
from .hblr import HblrData
from .hblr import HblrPrediction
from .hblr import HblrPriors
from .hblr import HblrSettings
from .hblr import PosteriorSamples
from .hblr import draw_from_prior
from .hblr import fit_hblr
from .hblr import gibbs_sweep
from .hblr import predict_hblr
from .hblr import simulate_targets
from .hblr import split_rhat
from .lasso import LassoFit
from .lasso import fit_lasso
from .lasso import max_penalty
from .lasso import select_penalty
from .lasso import soft_threshold
from .metrics import MetricsReport
from .metrics import Scheme
from .metrics import evaluate
from .models import MODEL_SPECS
from .models import ModelKind
from .models import ModelSpec
from .models import Regressor
from .models import create_regressor

__all__ = [
    'FeatureSubset',
    'GibbsState',
    'HblrData',
    'HblrPrediction',
    'HblrPriors',
    'HblrSettings',
    'LAST_SCORE',
    'LassoFit',
    'MODEL_SPECS',
    'MetricsReport',
    'ModelKind',
    'ModelSpec',
    'PosteriorSamples',
    'PredictionDesign',
    'PredictionError',
    'Regressor',
    'Scheme',
    'Standardizer',
    'create_regressor',
    'draw_from_prior',
    'evaluate',
    'fit_hblr',
    'fit_lasso',
    'gibbs_sweep',
    'max_penalty',
    'predict_hblr',
    'select_penalty',
    'simulate_targets',
    'soft_threshold',
    'split_rhat',
]
