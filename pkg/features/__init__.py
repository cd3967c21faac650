"""This package computes the 49 Bluetooth features of an interval."""

from .entropy import MseParams
from .entropy import MseProfile
from .entropy import coarse_grain
from .entropy import mse_profile
from .entropy import sample_entropy
from .entropy import template_match_counts
from .errors import FeatureError
from .extractor import FEATURE_NAMES
from .extractor import FeatureExtractor
from .extractor import FeatureVector
from .extractor import MSE_FEATURES
from .extractor import extract_features
from .frequency import Band
from .frequency import BandDefinition
from .frequency import FREQUENCY_FEATURES
from .frequency import SpectrumGrid
from .frequency import band_features
from .frequency import band_spectral_entropy
from .frequency import power_spectrum
from .statistical import DailyStats
from .statistical import STATISTICAL_FEATURES
from .statistical import daily_stats
from .statistical import second_order_features

__all__ = [
    'Band',
    'BandDefinition',
    'DailyStats',
    'FEATURE_NAMES',
    'FREQUENCY_FEATURES',
    'FeatureError',
    'FeatureExtractor',
    'FeatureVector',
    'MSE_FEATURES',
    'MseParams',
    'MseProfile',
    'STATISTICAL_FEATURES',
    'SpectrumGrid',
    'band_features',
    'band_spectral_entropy',
    'coarse_grain',
    'daily_stats',
    'extract_features',
    'mse_profile',
    'power_spectrum',
    'sample_entropy',
    'second_order_features',
    'template_match_counts',
]
