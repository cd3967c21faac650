"""This package implements the statistical association battery."""

from .associations import ASSOCIATION_COLUMNS
from .associations import AssociationResult
from .associations import associations_frame
from .associations import pairwise_associations
from .correlation import SpearmanMatrix
from .correlation import spearman_matrix
from .errors import InferenceError
from .errors import NonNestedModelsError
from .errors import RankDeficientError
from .lmm import INTERCEPT
from .lmm import LmmFit
from .lmm import design_matrix
from .lmm import drop_aliased_columns
from .lmm import fit_lmm
from .lrt import LrtResult
from .lrt import NestedComparison
from .lrt import NestedModel
from .lrt import chi2_critical_value
from .lrt import likelihood_ratio_test
from .lrt import nested_model_tests
from .multiple import bh_adjust

__all__ = [
    'ASSOCIATION_COLUMNS',
    'AssociationResult',
    'INTERCEPT',
    'InferenceError',
    'LmmFit',
    'LrtResult',
    'NestedComparison',
    'NestedModel',
    'NonNestedModelsError',
    'RankDeficientError',
    'SpearmanMatrix',
    'associations_frame',
    'bh_adjust',
    'chi2_critical_value',
    'design_matrix',
    'drop_aliased_columns',
    'fit_lmm',
    'likelihood_ratio_test',
    'nested_model_tests',
    'pairwise_associations',
    'spearman_matrix',
]
