"""Seeded generator of NBDC traces and PHQ-8 trajectories.

Every participant has a latent severity following an AR(1) process over
PHQ-8 intervals. The severity of an interval modulates the hourly trace
of the 14 days preceding its PHQ-8 record: higher severity lowers the
level, the circadian amplitude and the day-to-day variance, and raises
the hourly irregularity. An optional smoothness linkage changes the
hour-to-hour autocorrelation of the irregular component without
changing its variance.
"""

import dataclasses
import datetime
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator
import scipy.signal

import log
from model.types import DayGrid
from model.types import HOURS_PER_DAY
from model.types import NbdcInterval
from model.types import PHQ8_MAX
from model.types import PHQ8_MIN
from model.types import Phq8Record
from model.types import WINDOW_DAYS

DAYS_PER_WEEK = 7

MAX_SMOOTHNESS = 0.95
"""Largest hour-to-hour autocorrelation of the irregular component."""


class SeverityProcess(BaseModel):
    """AR(1) process of latent severity over intervals."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    mean: float = 10.0
    participant_sd: float = Field(default=4.0, ge=0)
    persistence: float = Field(default=0.7, ge=0, lt=1)
    noise_sd: float = Field(default=2.5, ge=0)


class TraceModel(BaseModel):
    """Hourly trace parameters at the mean severity."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    base_level: float = Field(default=20.0, ge=0)
    circadian_amplitude: float = Field(default=10.0, ge=0)
    weekly_amplitude: float = Field(default=3.0, ge=0)
    irregularity: float = Field(default=2.0, ge=0)
    day_sd: float = Field(default=2.0, ge=0)
    smoothness: float = Field(default=0.0, ge=0, le=MAX_SMOOTHNESS)
    missing_rate: float = Field(default=0.05, ge=0, le=1)


class Linkage(BaseModel):
    """Change of trace parameters per unit of severity above the mean."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    level: float = -0.6
    amplitude: float = -0.4
    irregularity: float = 0.15
    variance: float = -0.08
    smoothness: float = 0.0


class GeneratorSpec(BaseModel):
    """Complete description of a synthetic cohort."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    n_participants: int = Field(default=40, ge=1)
    min_intervals: int = Field(default=6, ge=1)
    max_intervals: int = Field(default=10, ge=1)
    start_date: datetime.date = datetime.date(2018, 1, 1)
    timezone: str = 'Europe/London'
    severity: SeverityProcess = SeverityProcess()
    trace: TraceModel = TraceModel()
    linkage: Linkage = Linkage()
    phq8_intercept: float = 0.0
    phq8_slope: float = Field(default=1.0, ge=0)
    phq8_noise_sd: float = Field(default=1.5, ge=0)
    seed: int = 42

    @model_validator(mode='after')
    def _check_intervals(self) -> 'GeneratorSpec':
        if self.min_intervals > self.max_intervals:
            raise ValueError('min_intervals exceeds max_intervals')
        return self

    @classmethod
    def load(cls, path: Path) -> 'GeneratorSpec':
        """Read a spec from a JSON file.

        Args:
            path (Path): JSON file.

        Returns:
            GeneratorSpec: Parsed spec.
        """
        return cls.model_validate_json(path.read_text(encoding='utf-8'))


@dataclasses.dataclass(frozen=True)
class TraceParams:
    """Trace parameters of one interval after severity linkage.

    `smoothness` is the lag-1 autocorrelation of the hourly irregular
    component, its variance stays `irregularity ** 2`.
    """

    level: float
    amplitude: float
    irregularity: float
    day_sd: float
    smoothness: float = 0.0

    @classmethod
    def linked(cls, spec: GeneratorSpec, severity: float) -> 'TraceParams':
        """Apply the linkage to a severity value.

        Args:
            spec (GeneratorSpec): Cohort spec.
            severity (float): Latent severity.

        Returns:
            TraceParams: Parameters floored at valid values.
        """
        deviation = severity - spec.severity.mean
        trace, linkage = spec.trace, spec.linkage
        return cls(
            level=max(0.0, trace.base_level + linkage.level * deviation),
            amplitude=max(
                0.0,
                trace.circadian_amplitude + linkage.amplitude * deviation,
            ),
            irregularity=max(
                0.1,
                trace.irregularity + linkage.irregularity * deviation,
            ),
            day_sd=max(0.0, trace.day_sd + linkage.variance * deviation),
            smoothness=float(np.clip(
                trace.smoothness + linkage.smoothness * deviation,
                0.0,
                MAX_SMOOTHNESS,
            )),
        )


@dataclasses.dataclass(frozen=True)
class SyntheticCohort:
    """Generated input tables with their ground truth."""

    scans: pd.DataFrame
    phq8: pd.DataFrame
    demographics: pd.DataFrame
    ground_truth: dict[str, Any]


def autocorrelated_noise(draws: np.ndarray, smoothness: float) -> np.ndarray:
    """Turn white noise into a stationary AR(1) sequence of equal variance.

    The sequence runs across day boundaries in row-major order.

    Args:
        draws (ndarray): Standard normal draws of any shape.
        smoothness (float): Lag-1 autocorrelation in `[0, 1)`.

    Returns:
        ndarray: Noise with the shape of `draws` and unit variance.
    """
    if smoothness == 0:
        return draws
    flat = draws.ravel().copy()
    innovation = np.sqrt(1 - smoothness**2)
    # Unscaled first value starts the process in its stationary state
    flat[0] /= innovation
    filtered = scipy.signal.lfilter([innovation], [1.0, -smoothness], flat)
    return filtered.reshape(draws.shape)


def simulate_days(
    params: TraceParams,
    n_days: int,
    weekly_amplitude: float,
    rng: np.random.Generator,
    first_weekday: int = 0,
) -> np.ndarray:
    """Simulate hourly device counts.

    Args:
        params (TraceParams): Trace parameters.
        n_days (int): Number of days.
        weekly_amplitude (float): Amplitude of the 7-day term.
        rng (Generator): Random generator.
        first_weekday (int): Weekday index of the first day.

    Returns:
        ndarray: `(n_days, 24)` non-negative integer counts.
    """
    hours = np.arange(HOURS_PER_DAY)
    days = np.arange(n_days)[:, None]
    phase = rng.uniform(-0.5, 0.5)
    circadian = params.amplitude * np.sin(
        2 * np.pi * (hours - 6) / HOURS_PER_DAY + phase,
    )
    weekly = weekly_amplitude * np.sin(
        2 * np.pi * (days + first_weekday) / DAYS_PER_WEEK,
    )
    day_offset = params.day_sd * rng.standard_normal((n_days, 1))
    noise = params.irregularity * autocorrelated_noise(
        rng.standard_normal((n_days, HOURS_PER_DAY)),
        params.smoothness,
    )
    counts = params.level + circadian + weekly + day_offset + noise
    return np.maximum(0, np.rint(counts))


def _latent_severity(
    spec: GeneratorSpec,
    n_intervals: int,
    rng: np.random.Generator,
) -> tuple[float, np.ndarray]:
    """Internal helper to simulate the severity path of a participant."""
    process = spec.severity
    center = process.mean + process.participant_sd * rng.standard_normal()
    stationary_sd = process.noise_sd / np.sqrt(1 - process.persistence**2)
    path = np.empty(n_intervals)
    path[0] = center + stationary_sd * rng.standard_normal()
    for t in range(1, n_intervals):
        path[t] = (
            center
            + process.persistence * (path[t - 1] - center)
            + process.noise_sd * rng.standard_normal()
        )
    return float(center), path


def expected_phq8(spec: GeneratorSpec, severity: float) -> float:
    """Returns the noise-free PHQ-8 score of a severity before rounding.

    Args:
        spec (GeneratorSpec): Cohort spec.
        severity (float): Latent severity.
    """
    value = spec.phq8_intercept + spec.phq8_slope * severity
    return float(np.clip(value, PHQ8_MIN, PHQ8_MAX))


def _timestamps(
    dates: list[datetime.date],
    minutes: np.ndarray,
    timezone: str,
) -> pd.Series:
    """Internal helper to format local day/hour slots as UTC ISO strings."""
    n_hours = minutes.shape[1]
    local = (
        np.repeat(np.array(dates, dtype='datetime64[D]'), n_hours)
        + np.tile(np.arange(n_hours), len(dates)) * np.timedelta64(1, 'h')
        + minutes.ravel() * np.timedelta64(1, 'm')
    )
    aware = pd.DatetimeIndex(local).tz_localize(
        timezone,
        ambiguous=np.zeros(local.size, dtype=bool),
        nonexistent='shift_forward',
    )
    return pd.Series(aware.tz_convert('UTC').strftime('%Y-%m-%dT%H:%M:%S+00:00'))


def _participant(
    spec: GeneratorSpec,
    participant_id: str,
    rng: np.random.Generator,
) -> tuple[pd.DataFrame, list[tuple[str, str, int]], tuple, dict[str, Any]]:
    """Internal helper to generate all data of one participant."""
    n_intervals = int(rng.integers(spec.min_intervals, spec.max_intervals + 1))
    center, severity = _latent_severity(spec, n_intervals, rng)
    start = spec.start_date + datetime.timedelta(days=int(rng.integers(0, 28)))

    scan_parts = []
    phq8_rows = []
    truth_intervals = []
    for t in range(n_intervals):
        params = TraceParams.linked(spec, float(severity[t]))
        first_day = start + datetime.timedelta(days=WINDOW_DAYS * t)
        dates = [first_day + datetime.timedelta(days=d) for d in range(WINDOW_DAYS)]
        counts = simulate_days(
            params,
            WINDOW_DAYS,
            spec.trace.weekly_amplitude,
            rng,
            first_weekday=first_day.weekday(),
        )
        minutes = rng.integers(0, 60, size=counts.shape)
        observed = rng.random(counts.shape) >= spec.trace.missing_rate
        frame = pd.DataFrame({
            'participant_id': participant_id,
            'timestamp': _timestamps(dates, minutes, spec.timezone),
            'device_count': counts.ravel().astype(int),
        })
        scan_parts.append(frame[observed.ravel()])

        completion = first_day + datetime.timedelta(days=WINDOW_DAYS)
        noisy = (
            spec.phq8_intercept
            + spec.phq8_slope * severity[t]
            + spec.phq8_noise_sd * rng.standard_normal()
        )
        score = int(np.clip(np.rint(noisy), PHQ8_MIN, PHQ8_MAX))
        phq8_rows.append((participant_id, completion.isoformat(), score))
        truth_intervals.append({
            'date': completion.isoformat(),
            'severity': float(severity[t]),
            'phq8': score,
            'trace': dataclasses.asdict(params),
        })

    age = int(rng.integers(20, 71))
    gender = rng.choice(['female', 'male', 'other'], p=[0.6, 0.38, 0.02])
    education = int(rng.integers(8, 21))
    truth = {
        'participant_id': participant_id,
        'severity_center': center,
        'intervals': truth_intervals,
    }
    return (
        pd.concat(scan_parts, ignore_index=True),
        phq8_rows,
        (participant_id, age, str(gender), education),
        truth,
    )


def generate_cohort(spec: GeneratorSpec | None = None) -> SyntheticCohort:
    """Generate input tables of a synthetic cohort.

    Participants are generated from seeds spawned off `spec.seed`, so
    identical specs give identical tables.

    Args:
        spec (Optional[GeneratorSpec]): Cohort description.

    Returns:
        SyntheticCohort: Scans, PHQ-8, demographics and ground truth.
    """
    logger = log.create_logger(generate_cohort)
    spec = spec or GeneratorSpec()
    seeds = np.random.SeedSequence(spec.seed).spawn(spec.n_participants)
    width = len(str(spec.n_participants))
    scans, phq8_rows, demo_rows, truths = [], [], [], []
    for index, seed in enumerate(seeds, start=1):
        participant_id = f'P{index:0{width}d}'
        frame, rows, demo, truth = _participant(
            spec,
            participant_id,
            np.random.default_rng(seed),
        )
        scans.append(frame)
        phq8_rows.extend(rows)
        demo_rows.append(demo)
        truths.append(truth)

    cohort = SyntheticCohort(
        scans=pd.concat(scans, ignore_index=True),
        phq8=pd.DataFrame(phq8_rows, columns=['participant_id', 'date', 'score']),
        demographics=pd.DataFrame(
            demo_rows,
            columns=['participant_id', 'age', 'gender', 'education_years'],
        ),
        ground_truth={
            'spec': spec.model_dump(mode='json'),
            'participants': truths,
        },
    )
    logger.info(
        'Generated %d participants, %d scans, %d PHQ-8 records',
        spec.n_participants,
        len(cohort.scans),
        len(cohort.phq8),
    )
    return cohort


def mild_severe_pair(seed: int = 0) -> tuple[NbdcInterval, NbdcInterval]:
    """Generate a mild and a moderately severe 14-day trace.

    The mild trace (PHQ-8 7) is regular with a high level and a strong
    circadian rhythm, the moderately severe one (PHQ-8 15) is irregular
    with a low level and a weak rhythm.

    Args:
        seed (int): Random seed.

    Returns:
        tuple[NbdcInterval, NbdcInterval]: Mild and moderately severe
            intervals.
    """
    rng = np.random.default_rng(seed)
    completion = datetime.date(2019, 1, 15)
    traces = (
        ('mild', 7, TraceParams(level=20, amplitude=12, irregularity=1.0, day_sd=1.0)),
        ('severe', 15, TraceParams(level=12, amplitude=3, irregularity=5.0, day_sd=0.5)),
    )
    intervals = []
    for participant_id, score, params in traces:
        counts = simulate_days(params, WINDOW_DAYS, 1.0, rng)
        days = tuple(
            DayGrid(
                participant_id=participant_id,
                date=completion - datetime.timedelta(days=WINDOW_DAYS - d),
                hours=tuple(float(v) for v in counts[d]),
            )
            for d in range(WINDOW_DAYS)
        )
        intervals.append(
            NbdcInterval(
                participant_id=participant_id,
                phq8=Phq8Record(participant_id, completion, score),
                days=days,
            ),
        )
    return intervals[0], intervals[1]
