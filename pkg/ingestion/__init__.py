"""This package turns raw scans into gap-filled PHQ-8 intervals."""

from .days import DEFAULT_TIMEZONE
from .days import bin_scans_to_days
from .days import interpolate_day
from .errors import IngestionError
from .errors import InvalidDayError
from .intervals import AssemblyResult
from .intervals import Rejection
from .intervals import RejectionReason
from .intervals import RetentionStats
from .intervals import assemble_intervals

__all__ = [
    'AssemblyResult',
    'DEFAULT_TIMEZONE',
    'IngestionError',
    'InvalidDayError',
    'Rejection',
    'RejectionReason',
    'RetentionStats',
    'assemble_intervals',
    'bin_scans_to_days',
    'interpolate_day',
]
