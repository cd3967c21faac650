import json

import pandas as pd
import pytest

from cli import AssociateCommand
from cli import ExtractCommand
from cli import IngestCommand
from cli import PredictCommand
from cli import ReportCommand
from cli import RunAllCommand
from cli import SimulateCommand
from cli import SummarizeCommand
from controller import Controller
from controller.report import metrics_cell
from controller.report import mse_by_severity
from controller.report import render_report
from features import FEATURE_NAMES
from features.extractor import FLAGS_COLUMN
from features.extractor import ID_COLUMNS
from model import ArtifactMissingError
from model import ArtifactStore
from prediction import Scheme

SPEC = {
    'n_participants': 4,
    'min_intervals': 2,
    'max_intervals': 3,
    'timezone': 'UTC',
    'trace': {'missing_rate': 0.0},
}


@pytest.fixture
def store():
    return ArtifactStore()


@pytest.fixture
def controller(store):
    return Controller(store, threads=1)


@pytest.fixture
def synth(tmp_path, controller):
    """Directory with the input tables of a small synthetic cohort."""
    spec = tmp_path / 'spec.json'
    spec.write_text(json.dumps(SPEC), encoding='utf-8')
    out = tmp_path / 'synth'
    controller.simulate(SimulateCommand(spec=spec, out_dir=out, seed=5))
    return out


def ingest(controller, synth, out):
    return controller.ingest(IngestCommand(
        scans=synth / 'scans.csv',
        phq8=synth / 'phq8.csv',
        demo=synth / 'demographics.csv',
        tz='UTC',
        out=out / 'intervals.jsonl',
    ))


def test_simulate_uses_run_seed(tmp_path, controller, store):
    spec = tmp_path / 'spec.json'
    spec.write_text(json.dumps(SPEC), encoding='utf-8')
    first = controller.simulate(SimulateCommand(spec=spec, out_dir=tmp_path / 'a', seed=1))
    again = controller.simulate(SimulateCommand(spec=spec, out_dir=tmp_path / 'b', seed=1))
    pd.testing.assert_frame_equal(first.phq8, again.phq8)
    assert first.ground_truth['spec']['seed'] == 1
    metadata = store.read_metadata(tmp_path / 'a' / 'phq8.csv', 'simulate')
    assert metadata['command'] == 'simulate'
    assert metadata['seed'] == 1


def test_ingest_synthetic_tables(tmp_path, controller, store, synth):
    result = ingest(controller, synth, tmp_path)
    phq8 = store.read_input_table(synth / 'phq8.csv')
    assert len(result.intervals) == len(phq8)
    assert all(i.n_valid_days == 14 for i in result.intervals)

    intervals = store.read_intervals(tmp_path / 'intervals.jsonl', 'ingest')
    assert [i.key for i in intervals] == [i.key for i in result.intervals]
    metadata = store.read_metadata(tmp_path / 'intervals.jsonl', 'ingest')
    assert sorted(metadata['input_hashes']) == [
        'demographics.csv', 'phq8.csv', 'scans.csv',
    ]
    assert metadata['statistics']['n_intervals'] == len(phq8)
    rejections = store.read_table(tmp_path / 'rejections.csv', 'ingest')
    assert rejections.columns.tolist() == ['participant_id', 'date', 'reason']
    assert rejections.empty


def test_extract_reruns_are_identical(tmp_path, controller, synth):
    ingest(controller, synth, tmp_path)
    command = ExtractCommand(
        intervals=tmp_path / 'intervals.jsonl',
        out=tmp_path / 'features.csv',
    )
    frame = controller.extract(command)
    first = (tmp_path / 'features.csv').read_bytes()
    controller.extract(command)
    assert (tmp_path / 'features.csv').read_bytes() == first
    assert frame.columns.tolist() == [*ID_COLUMNS, *FEATURE_NAMES, FLAGS_COLUMN]
    assert first.startswith(b'# proxiphene-metadata: {')


def test_extract_without_intervals(tmp_path, controller, store):
    store.write_intervals(tmp_path / 'intervals.jsonl', [])
    controller.extract(ExtractCommand(
        intervals=tmp_path / 'intervals.jsonl',
        out=tmp_path / 'features.csv',
    ))
    frame = store.read_table(tmp_path / 'features.csv', 'extract')
    assert frame.empty
    assert frame.columns.tolist() == [*ID_COLUMNS, *FEATURE_NAMES, FLAGS_COLUMN]


def test_summarize(tmp_path, controller, synth):
    ingest(controller, synth, tmp_path)
    controller.extract(ExtractCommand(
        intervals=tmp_path / 'intervals.jsonl',
        out=tmp_path / 'features.csv',
    ))
    summary = controller.summarize(SummarizeCommand(
        features=tmp_path / 'features.csv',
        demo=synth / 'demographics.csv',
        out=tmp_path / 'summary.json',
    ))
    assert summary.n_participants == 4
    assert sum(summary.severity_counts.values()) == summary.n_intervals
    written = json.loads((tmp_path / 'summary.json').read_text(encoding='utf-8'))
    assert written['n_intervals'] == summary.n_intervals
    assert written['metadata']['command'] == 'summarize'


def test_predict_needs_features(tmp_path, controller, synth):
    with pytest.raises(ArtifactMissingError, match='proxiphene extract'):
        controller.predict(PredictCommand(
            features=tmp_path / 'features.csv',
            demo=synth / 'demographics.csv',
        ))


def test_report_needs_upstream_artifacts(tmp_path, controller):
    with pytest.raises(ArtifactMissingError, match='proxiphene associate'):
        controller.report(ReportCommand(
            associations=tmp_path / 'associations.csv',
            out_dir=tmp_path / 'report',
        ))


ASSOCIATIONS = pd.DataFrame({
    'feature': ['Mean_Mean', 'MSE_3', 'Min_Min'],
    'estimate': [-0.5, 1.25, float('nan')],
    'se': [0.2, 0.5, float('nan')],
    'z': [-2.5, 2.5, float('nan')],
    'p': [0.0124, 0.0124, float('nan')],
    'p_adjusted': [0.0186, 0.0186, float('nan')],
    'skipped': ['', '', 'constant feature'],
})

LRT = {
    'models': {
        'A': {'dropped': []},
        'B': {'dropped': []},
        'C': {'dropped': ['MSE_24']},
    },
    'tests': [
        {'small': 'A', 'large': 'B', 'df': 16, 'chi2': 31.04, 'p': 0.0134,
         'critical_0.05': 26.296},
    ],
}

PREDICTION = {
    'cohort': {'participants': 10, 'intervals': 60},
    'rows': [
        {'model': 'hblr', 'description': 'HBLR', 'lao_r2': 0.526,
         'lao_rmse': 3.891, 'lao_n_test': 50},
        {'model': 'last', 'lao_r2': None, 'lao_rmse': 4.0, 'lao_n_test': 50,
         'loo_r2': 0.1, 'loo_rmse': 5.0, 'loo_n_test': 20},
    ],
}


class TestRenderReport:

    def test_tables(self):
        text = render_report(ASSOCIATIONS, LRT, PREDICTION)
        assert text.startswith('# Bluetooth features and depressive symptom severity\n')
        assert '| HBLR | R²=0.526, RMSE=3.891 | not evaluated |' in text
        assert '| Last observed PHQ-8 score | R²=n/a, RMSE=4.000 | R²=0.100, RMSE=5.000 |' in text
        assert '| XGBoost (all Bluetooth features, out of scope) | not evaluated | not evaluated |' in text
        assert '| A vs B | 16 | 31.04 | 0.013 | 26.296 |' in text
        assert '| MSE_3 | 1.250 | 0.500 | 2.50 | 0.012 | 0.019 |' in text
        assert 'Skipped features: Min_Min.' in text
        assert 'dropped before fitting: MSE_24.' in text
        assert 'No demographics given' in text
        assert 'Predictions pooled over 10 participants and 60 intervals.' in text

    def test_no_significant_associations(self):
        associations = ASSOCIATIONS.assign(p_adjusted=0.5)
        text = render_report(associations, LRT, PREDICTION)
        assert 'No significant associations.' in text
        assert 'Showing 0 of 2 tested features' in text

    def test_plot_files(self):
        text = render_report(
            ASSOCIATIONS.iloc[:0],
            {},
            {},
            plot_files={'spearman.csv': 'correlations'},
        )
        assert '- `spearman.csv`: correlations' in text
        assert 'No significant associations.' in text

    def test_metrics_cell(self):
        row = PREDICTION['rows'][0]
        assert metrics_cell(row, Scheme.LAO) == 'R²=0.526, RMSE=3.891'
        assert metrics_cell(row, Scheme.LOO) == 'not evaluated'


def test_mse_by_severity():
    profiles = pd.DataFrame({
        'participant_id': ['P1'] * 4,
        'date': ['2019-01-01', '2019-01-01', '2019-01-15', '2019-01-15'],
        'phq8': [3, 3, 22, 22],
        'severity': ['asymptomatic', 'asymptomatic', 'severe', 'severe'],
        'scale': [1, 2, 1, 2],
        'mse': [1.0, float('nan'), 0.5, 0.25],
    })
    frame = mse_by_severity(profiles)
    assert frame['severity'].tolist() == ['asymptomatic', 'asymptomatic', 'severe', 'severe']
    assert frame['n'].tolist() == [1, 0, 1, 1]
    assert frame['mean'].iloc[3] == 0.25


def snapshot(directory):
    return {
        path.relative_to(directory).as_posix(): path.read_bytes()
        for path in sorted(directory.rglob('*'))
        if path.is_file()
    }


@pytest.mark.slow
def test_run_all(tmp_path, controller, store):
    spec = tmp_path / 'spec.json'
    spec.write_text(json.dumps({
        'n_participants': 12,
        'min_intervals': 6,
        'max_intervals': 7,
        'timezone': 'UTC',
        'severity': {'noise_sd': 5.0, 'persistence': 0.3},
    }), encoding='utf-8')
    synth = tmp_path / 'synth'
    controller.simulate(SimulateCommand(spec=spec, out_dir=synth, seed=9))
    out = tmp_path / 'results'
    command = RunAllCommand(
        scans=synth / 'scans.csv',
        phq8=synth / 'phq8.csv',
        demo=synth / 'demographics.csv',
        tz='UTC',
        chains=2,
        draws=40,
        burn=20,
        out_dir=out,
        seed=9,
    )
    controller.run_all(command)
    first = snapshot(out)

    for name in (
        'intervals.jsonl', 'rejections.csv', 'features.csv', 'summary.json',
        'associations.csv', 'lrt.json', 'splits_lao.json', 'splits_loo.json',
        'prediction.json', 'predictions.csv', 'report/report.md',
        'report/mse_profiles.csv', 'report/mse_by_severity.csv',
    ):
        assert name in first, name
    assert any(name.startswith('report/spectra/') for name in first)

    prediction = store.read_json(out / 'prediction.json', 'predict')
    assert [row['model'] for row in prediction['rows']] == [
        'hblr', 'hblr-stat', 'baseline', 'lasso', 'last',
    ]
    lrt = store.read_json(out / 'lrt.json', 'lrt')
    assert sorted(lrt['models']) == ['A', 'B', 'C']
    assert len(lrt['tests']) == 3
    report = (out / 'report' / 'report.md').read_text(encoding='utf-8')
    assert report.startswith('<!-- proxiphene-metadata: {')
    assert '## Prediction performance' in report

    # Same inputs and seed, every output byte for byte
    controller.run_all(command)
    again = snapshot(out)
    assert sorted(again) == sorted(first)
    for name, content in first.items():
        assert again[name] == content, name


PLANTED = {
    'n_participants': 40,
    'min_intervals': 6,
    'max_intervals': 8,
    'timezone': 'UTC',
    'trace': {'missing_rate': 0.0, 'smoothness': 0.45},
    'linkage': {'smoothness': -0.06},
}

# Severity moves the rhythm regularity, barely the level
REGULARITY_PLANTED = {
    'n_participants': 100,
    'min_intervals': 6,
    'max_intervals': 7,
    'timezone': 'UTC',
    'severity': {'participant_sd': 3.0, 'persistence': 0.3, 'noise_sd': 3.5},
    'trace': {
        'circadian_amplitude': 8.0,
        'irregularity': 4.0,
        'smoothness': 0.45,
        'missing_rate': 0.0,
    },
    'linkage': {
        'level': -0.1,
        'amplitude': 0.0,
        'irregularity': 0.0,
        'variance': 0.0,
        'smoothness': -0.06,
    },
}


def planted_features(controller, directory, spec, seed):
    """Simulate, ingest and extract a cohort, returning features and demographics."""
    spec_path = directory / 'spec.json'
    spec_path.write_text(json.dumps(spec), encoding='utf-8')
    synth = directory / 'synth'
    controller.simulate(SimulateCommand(spec=spec_path, out_dir=synth, seed=seed))
    ingest(controller, synth, directory)
    controller.extract(ExtractCommand(
        intervals=directory / 'intervals.jsonl',
        out=directory / 'features.csv',
        seed=seed,
    ))
    return directory / 'features.csv', synth / 'demographics.csv'


@pytest.mark.slow
@pytest.mark.parametrize('seed', [1, 2, 3])
def test_planted_association_directions(tmp_path, controller, seed):
    features, demo = planted_features(controller, tmp_path, PLANTED, seed)
    frame = controller.associate(AssociateCommand(
        features=features,
        demo=demo,
        out=tmp_path / 'associations.csv',
        seed=seed,
    ))
    estimates = frame.set_index('feature')['estimate']
    assert estimates['Mean_Mean'] < 0
    assert estimates['MF_sum'] < 0
    assert estimates['Min_Max'] < 0
    assert estimates['MSE_1'] > 0


@pytest.mark.slow
def test_features_improve_prediction(tmp_path, controller):
    models = ('hblr', 'hblr-stat', 'baseline')
    wins_over_baseline = 0
    wins_over_statistical = 0
    for seed in range(20):
        directory = tmp_path / f'seed{seed}'
        directory.mkdir()
        features, demo = planted_features(
            controller,
            directory,
            REGULARITY_PLANTED,
            seed,
        )
        r2 = {}
        for name in models:
            payload = controller.predict(PredictCommand(
                features=features,
                demo=demo,
                scheme=Scheme.LAO,
                model=name,
                chains=2,
                draws=300,
                burn=150,
                out=directory / f'{name}.json',
                seed=seed,
            ))
            r2[name] = payload['rows'][0]['lao_r2']
        wins_over_baseline += r2['hblr'] > r2['baseline']
        wins_over_statistical += r2['hblr'] > r2['hblr-stat']
    assert wins_over_baseline >= 18
    assert wins_over_statistical >= 15
