"""This package defines core domain types and their persistence."""

from .store import ArtifactError
from .store import ArtifactMissingError
from .store import ArtifactStore
from .store import RunMetadata
from .types import Demographics
from .types import DayGrid
from .types import Gender
from .types import NbdcInterval
from .types import Phq8Record
from .types import ProxipheneError
from .types import ScanRecord
from .types import SeverityBand
from .types import severity_band
from .validation import DatasetError
from .validation import ValidationReport
from .validation import validate_dataset
from .validation import validate_demographics

__all__ = [
    'ArtifactError',
    'ArtifactMissingError',
    'ArtifactStore',
    'DatasetError',
    'DayGrid',
    'Demographics',
    'Gender',
    'NbdcInterval',
    'Phq8Record',
    'ProxipheneError',
    'RunMetadata',
    'ScanRecord',
    'SeverityBand',
    'ValidationReport',
    'severity_band',
    'validate_dataset',
    'validate_demographics',
]
