import statistics

import numpy as np
import pytest

from features import FEATURE_NAMES
from features import FeatureExtractor
from features import MseParams
from features import extract_features
from features import template_match_counts
from features.extractor import FLAGS_COLUMN
from features.extractor import ID_COLUMNS
from features.extractor import feature_matrix
from synthetic import mild_severe_pair
import oracles


def test_feature_names():
    assert len(FEATURE_NAMES) == 49
    assert len(set(FEATURE_NAMES)) == 49
    assert FEATURE_NAMES[0] == 'Max_Max'
    assert FEATURE_NAMES[16] == 'MSE_1'
    assert FEATURE_NAMES[39] == 'MSE_24'
    assert FEATURE_NAMES[-1] == 'HF_se'


def test_vector_of_one_interval(random_interval):
    vector = extract_features(random_interval)
    assert tuple(vector.values) == FEATURE_NAMES
    assert vector.participant_id == 'P1'
    assert vector.date == random_interval.phq8.completion_date
    assert vector.phq8 == 10
    assert vector.finite


@pytest.mark.slow
def test_matches_reference_implementations(interval_factory, rng):
    for _ in range(100):
        n_days = int(rng.integers(10, 15))
        matrix = rng.poisson(rng.uniform(3, 30), size=(n_days, 24)).astype(float)
        sequence = matrix.ravel()
        vector = extract_features(interval_factory(sequence))
        expected = {
            **oracles.second_order_features(matrix.tolist()),
            **{
                f'MSE_{scale}': value
                for scale, value in enumerate(
                    oracles.mse_profile(sequence),
                    start=1,
                )
            },
            **oracles.frequency_features(sequence),
        }
        assert expected.keys() == vector.values.keys()
        for name, value in expected.items():
            assert vector.values[name] == pytest.approx(value, rel=1e-9, abs=1e-12)

        r = 0.15 * statistics.stdev(sequence.tolist())
        assert template_match_counts(sequence, 2, r) == oracles.match_counts(
            sequence,
            2,
            r,
        )


def test_flags_of_degenerate_traces(interval_factory):
    flat = extract_features(interval_factory(np.zeros(240)))
    assert 'zero_power' in flat.flags
    assert 'MF_se:zero_power' in flat.flags
    assert flat.values['LF_pct'] == 0.0
    assert flat.finite

    growing = extract_features(interval_factory(np.arange(240.0) ** 2))
    assert 'MSE_24:undefined' in growing.flags


def test_threads_do_not_change_results(interval_factory, rng):
    intervals = [
        interval_factory(rng.poisson(10, size=336), participant_id=f'P{i}')
        for i in range(6)
    ]
    serial = FeatureExtractor().extract_all(intervals)
    threaded = FeatureExtractor(threads=3).extract_all(intervals)
    assert serial == threaded
    assert [v.participant_id for v in threaded] == [f'P{i}' for i in range(6)]


def test_frame_layout(random_interval):
    extractor = FeatureExtractor()
    frame = extractor.to_frame(extractor.extract_all([random_interval]))
    assert frame.columns.tolist() == [*ID_COLUMNS, *FEATURE_NAMES, FLAGS_COLUMN]
    assert frame.loc[0, 'date'] == '2019-03-15'
    assert feature_matrix(frame).shape == (1, 49)


def test_empty_frame():
    frame = FeatureExtractor().to_frame([])
    assert frame.empty
    assert frame.columns.tolist() == [*ID_COLUMNS, *FEATURE_NAMES, FLAGS_COLUMN]


def test_fewer_scales(random_interval):
    extractor = FeatureExtractor(mse_params=MseParams(max_scale=6))
    vector = extractor.extract(random_interval)
    assert len(vector.values) == 16 + 6 + 9
    assert 'MSE_7' not in vector.values


def test_mild_and_severe_traces_differ():
    mild, severe = mild_severe_pair(seed=11)
    mild_features = extract_features(mild).values
    severe_features = extract_features(severe).values
    assert mild_features['Mean_Mean'] > severe_features['Mean_Mean']
    assert mild_features['Mean_Std'] > severe_features['Mean_Std']
    assert mild_features['MF_pct'] > severe_features['MF_pct']
    assert mild_features['HF_pct'] < severe_features['HF_pct']
