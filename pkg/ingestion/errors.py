"""Exceptions raised while preparing NBDC sequences."""

from model.types import DayGrid
from model.types import ProxipheneError


class IngestionError(ProxipheneError):
    """Base type for all ingestion exceptions."""


class InvalidDayError(IngestionError):
    """An operation that requires a valid day received an invalid one."""

    def __init__(self, day: DayGrid) -> None:
        """Initialize an exception object.

        Args:
            day (DayGrid): Offending day.
        """
        super().__init__(
            f'Day {day.date} of {day.participant_id} has only '
            f'{day.n_observed} observed hours',
        )
