"""This module turns raw scans into hourly day grids and fills their gaps."""

from collections.abc import Iterable
import zoneinfo

import numpy as np
import pandas as pd

import log
from model.tables import scans_frame
from model.types import DayGrid
from model.types import HOURS_PER_DAY
from model.types import ScanRecord

from .errors import IngestionError
from .errors import InvalidDayError

DEFAULT_TIMEZONE = 'UTC'


def bin_scans_to_days(
    scans: pd.DataFrame | Iterable[ScanRecord],
    timezone: str = DEFAULT_TIMEZONE,
) -> list[DayGrid]:
    """Assign scans to the local day and hour slot containing them.

    Several scans within one hour are reduced to their arithmetic mean.
    Days are bounded by local midnight of `timezone`, slots are indexed
    by the wall-clock start hour.

    Args:
        scans (DataFrame | Iterable[ScanRecord]): Raw or typed scans
            table, or scan records.
        timezone (str): IANA name of the dataset timezone.

    Returns:
        list[DayGrid]: Days sorted by participant and date.

    Raises:
        IngestionError: Unknown timezone or unparseable timestamps.
    """
    logger = log.create_logger(bin_scans_to_days)
    tz = _load_timezone(timezone)
    frame = _typed_scans(scans)
    bad_rows = frame['timestamp'].isna() | frame['device_count'].isna()
    if bad_rows.any():
        rows = [int(i) + 1 for i in bad_rows.to_numpy().nonzero()[0]]
        raise IngestionError(f'Unparseable scan rows: {rows[:20]}')
    if frame.empty:
        return []

    local = frame['timestamp'].dt.tz_convert(tz)
    frame = frame.assign(date=local.dt.date, hour=local.dt.hour)
    means = frame.groupby(
        ['participant_id', 'date', 'hour'],
        sort=True,
    )['device_count'].mean()
    grid = means.unstack('hour').reindex(columns=range(HOURS_PER_DAY))

    days = [
        DayGrid(
            participant_id=str(pid),
            date=date,
            hours=tuple(
                None if np.isnan(value) else float(value) for value in row
            ),
        )
        for (pid, date), row in zip(grid.index, grid.to_numpy())
    ]
    n_valid = sum(day.valid for day in days)
    logger.info(
        'Binned %d scans into %d days (%d valid)',
        len(frame),
        len(days),
        n_valid,
    )
    return days


def interpolate_day(day: DayGrid) -> DayGrid:
    """Fill missing hours of a valid day.

    Interior gaps are filled linearly between the nearest observed
    slots, leading and trailing gaps repeat the nearest observed value.
    Observed slots are never changed; a fully populated day is returned
    as is.

    Args:
        day (DayGrid): Valid day.

    Returns:
        DayGrid: Fully populated day.

    Raises:
        InvalidDayError: The day is not valid.
    """
    if not day.valid:
        raise InvalidDayError(day)
    if day.populated:
        return day
    values = day.values()
    observed = ~np.isnan(values)
    slots = np.arange(HOURS_PER_DAY)
    # np.interp repeats the edge values outside the observed range
    filled = np.interp(slots, slots[observed], values[observed])
    missing = tuple(int(i) for i in slots[~observed])
    return DayGrid(
        participant_id=day.participant_id,
        date=day.date,
        hours=tuple(
            float(v) if obs else float(f)
            for v, f, obs in zip(values, filled, observed)
        ),
        imputed=tuple(sorted(day.imputed + missing)),
    )


def _typed_scans(scans: pd.DataFrame | Iterable[ScanRecord]) -> pd.DataFrame:
    """Internal helper to get a typed scans frame from any scans input."""
    if (
        isinstance(scans, pd.DataFrame)
        and isinstance(scans.get('timestamp'), pd.Series)
        and isinstance(scans['timestamp'].dtype, pd.DatetimeTZDtype)
    ):
        return scans.reset_index(drop=True)
    return scans_frame(scans)


def _load_timezone(name: str) -> zoneinfo.ZoneInfo:
    """Internal helper to resolve a timezone name.

    Raises:
        IngestionError: Unknown timezone.
    """
    try:
        return zoneinfo.ZoneInfo(name)
    except (zoneinfo.ZoneInfoNotFoundError, ValueError) as e:
        raise IngestionError(f'Unknown timezone {name!r}') from e
