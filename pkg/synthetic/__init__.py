"""This package generates synthetic cohorts with known ground truth."""

from .generator import GeneratorSpec
from .generator import Linkage
from .generator import SeverityProcess
from .generator import SyntheticCohort
from .generator import TraceModel
from .generator import TraceParams
from .generator import autocorrelated_noise
from .generator import expected_phq8
from .generator import generate_cohort
from .generator import mild_severe_pair
from .generator import simulate_days

__all__ = [
    'GeneratorSpec',
    'Linkage',
    'SeverityProcess',
    'SyntheticCohort',
    'TraceModel',
    'TraceParams',
    'autocorrelated_noise',
    'expected_phq8',
    'generate_cohort',
    'mild_severe_pair',
    'simulate_days',
]
