import json

import numpy as np
import pandas as pd
import pydantic
import pytest

from ingestion import assemble_intervals
from ingestion import bin_scans_to_days
from model import validate_dataset
from model.tables import phq8_records
from synthetic import GeneratorSpec
from synthetic import Linkage
from synthetic import TraceModel
from synthetic import TraceParams
from synthetic import autocorrelated_noise
from synthetic import expected_phq8
from synthetic import generate_cohort
from synthetic import mild_severe_pair
from synthetic import simulate_days


def test_identical_specs_give_identical_tables(small_cohort):
    again = generate_cohort(small_cohort_spec())
    pd.testing.assert_frame_equal(again.scans, small_cohort.scans)
    pd.testing.assert_frame_equal(again.phq8, small_cohort.phq8)
    pd.testing.assert_frame_equal(again.demographics, small_cohort.demographics)
    assert again.ground_truth == small_cohort.ground_truth


def small_cohort_spec():
    return GeneratorSpec(
        n_participants=6,
        min_intervals=3,
        max_intervals=5,
        timezone='UTC',
        seed=7,
    )


def test_seed_changes_tables(small_cohort):
    other = generate_cohort(small_cohort_spec().model_copy(update={'seed': 8}))
    assert not other.phq8.equals(small_cohort.phq8)


def test_tables_pass_validation(small_cohort):
    report = validate_dataset(
        small_cohort.scans.astype(str),
        small_cohort.phq8.astype(str),
        small_cohort.demographics.astype(str),
    )
    assert report.accepted
    assert report.issues == ()


def test_layout(small_cohort):
    assert sorted(small_cohort.phq8['participant_id'].unique()) == [
        f'P{i}' for i in range(1, 7)
    ]
    counts = small_cohort.phq8.groupby('participant_id').size()
    assert counts.between(3, 5).all()
    assert small_cohort.phq8['score'].between(0, 24).all()
    assert small_cohort.scans['timestamp'].str.endswith('+00:00').all()
    truth = small_cohort.ground_truth['participants']
    assert [p['participant_id'] for p in truth] == [f'P{i}' for i in range(1, 7)]
    scores = [i['phq8'] for p in truth for i in p['intervals']]
    assert scores == small_cohort.phq8['score'].tolist()


def test_padded_participant_ids():
    cohort = generate_cohort(GeneratorSpec(n_participants=12, min_intervals=1, max_intervals=1))
    assert cohort.demographics['participant_id'].tolist()[:2] == ['P01', 'P02']


@pytest.mark.parametrize('timezone', ['UTC', 'Europe/London'])
def test_complete_traces_give_full_intervals(timezone):
    spec = GeneratorSpec(
        n_participants=3,
        min_intervals=2,
        max_intervals=3,
        timezone=timezone,
        trace=TraceModel(missing_rate=0.0),
        seed=3,
    )
    cohort = generate_cohort(spec)
    days = bin_scans_to_days(cohort.scans, spec.timezone)
    assert all(day.n_observed == 24 for day in days)
    result = assemble_intervals(days, phq8_records(cohort.phq8))
    assert len(result.intervals) == len(cohort.phq8)
    assert all(interval.n_valid_days == 14 for interval in result.intervals)


def test_expected_score_is_monotone():
    spec = GeneratorSpec()
    scores = [expected_phq8(spec, s) for s in np.linspace(-10, 40, 101)]
    assert (np.diff(scores) >= 0).all()
    assert scores[0] == 0.0
    assert scores[-1] == 24.0


def test_linkage_direction():
    spec = GeneratorSpec()
    mild = TraceParams.linked(spec, 5.0)
    severe = TraceParams.linked(spec, 18.0)
    assert severe.level < mild.level
    assert severe.amplitude < mild.amplitude
    assert severe.irregularity > mild.irregularity
    assert severe.day_sd < mild.day_sd


def test_white_noise_unchanged(rng):
    draws = rng.standard_normal((3, 24))
    np.testing.assert_array_equal(autocorrelated_noise(draws, 0.0), draws)


def test_autocorrelated_noise(rng):
    noise = autocorrelated_noise(rng.standard_normal((2000, 24)), 0.8).ravel()
    assert noise.shape == (48000,)
    assert np.corrcoef(noise[:-1], noise[1:])[0, 1] == pytest.approx(0.8, abs=0.02)
    assert noise.var() == pytest.approx(1.0, abs=0.1)


def test_smoothness_linkage():
    spec = GeneratorSpec(
        trace=TraceModel(smoothness=0.45),
        linkage=Linkage(smoothness=-0.06),
    )
    mild = TraceParams.linked(spec, 5.0)
    severe = TraceParams.linked(spec, 18.0)
    assert mild.smoothness == pytest.approx(0.75)
    assert severe.smoothness == pytest.approx(0.0)
    assert TraceParams.linked(spec, -20.0).smoothness == 0.95
    assert TraceParams.linked(GeneratorSpec(), 18.0).smoothness == 0.0


def test_simulated_days(rng):
    params = TraceParams(level=5.0, amplitude=8.0, irregularity=2.0, day_sd=1.0)
    counts = simulate_days(params, 14, 1.0, rng)
    assert counts.shape == (14, 24)
    assert (counts >= 0).all()
    np.testing.assert_array_equal(counts, np.rint(counts))


def test_mild_and_severe_pair():
    mild, severe = mild_severe_pair(seed=1)
    assert (mild.phq8.score, severe.phq8.score) == (7, 15)
    assert mild.n_valid_days == severe.n_valid_days == 14
    assert mild.sequence.mean() > severe.sequence.mean()


class TestSpec:

    def test_interval_bounds(self):
        with pytest.raises(pydantic.ValidationError):
            GeneratorSpec(min_intervals=5, max_intervals=4)

    def test_unknown_keys(self):
        with pytest.raises(pydantic.ValidationError):
            GeneratorSpec.model_validate({'participants': 3})

    def test_load(self, tmp_path):
        path = tmp_path / 'spec.json'
        path.write_text(
            json.dumps({'n_participants': 2, 'trace': {'missing_rate': 0.2}}),
            encoding='utf-8',
        )
        spec = GeneratorSpec.load(path)
        assert spec.n_participants == 2
        assert spec.trace.missing_rate == 0.2
        assert spec.trace.base_level == TraceModel().base_level
