"""Shared fixtures of the test suite."""

from collections.abc import Callable
import datetime

import numpy as np
import pytest

from model.types import DayGrid
from model.types import HOURS_PER_DAY
from model.types import NbdcInterval
from model.types import Phq8Record
from synthetic import GeneratorSpec
from synthetic import SyntheticCohort
from synthetic import generate_cohort

COMPLETION_DATE = datetime.date(2019, 3, 15)

IntervalFactory = Callable[..., NbdcInterval]


def make_interval(
    values: np.ndarray,
    participant_id: str = 'P1',
    completion_date: datetime.date = COMPLETION_DATE,
    score: int = 10,
) -> NbdcInterval:
    """Wrap hourly values into an interval ending the day before completion."""
    matrix = np.asarray(values, dtype=float).reshape(-1, HOURS_PER_DAY)
    n_days = matrix.shape[0]
    days = tuple(
        DayGrid(
            participant_id=participant_id,
            date=completion_date - datetime.timedelta(days=n_days - d),
            hours=tuple(float(v) for v in matrix[d]),
        )
        for d in range(n_days)
    )
    return NbdcInterval(
        participant_id=participant_id,
        phq8=Phq8Record(participant_id, completion_date, score),
        days=days,
    )


@pytest.fixture
def interval_factory() -> IntervalFactory:
    return make_interval


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20190315)


@pytest.fixture
def random_interval(rng: np.random.Generator) -> NbdcInterval:
    return make_interval(rng.poisson(15, size=14 * HOURS_PER_DAY))


@pytest.fixture(scope='session')
def small_cohort() -> SyntheticCohort:
    spec = GeneratorSpec(
        n_participants=6,
        min_intervals=3,
        max_intervals=5,
        timezone='UTC',
        seed=7,
    )
    return generate_cohort(spec)
